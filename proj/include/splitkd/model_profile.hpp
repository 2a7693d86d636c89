#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace splitkd {

/// Per-layer cost record: FLOPs for one sample at the profile's reference
/// sequence length, parameter bytes, and the byte size of the layer's output
/// activations for one sample.
struct LayerProfile {
    double flops_forward = 0.0;
    double flops_backward = 0.0;
    std::int64_t param_bytes = 0;
    std::int64_t activation_bytes_per_sample = 0;
};

/// Builds a LayerProfile with the default backward cost of 2x forward.
LayerProfile make_layer(double flops_forward, std::int64_t param_bytes,
                        std::int64_t activation_bytes_per_sample);

struct ModelProfile {
    std::string name;
    LayerProfile embedding;
    std::vector<LayerProfile> blocks;
    LayerProfile head;
    /// Numeric precision (bytes per element) the activation byte counts were
    /// computed at. Cut-boundary payloads are rescaled when transmitted at a
    /// different wire precision.
    int precision_bytes = 2;

    int block_count() const { return static_cast<int>(blocks.size()); }
};

/// Throws std::invalid_argument when a profile violates its invariants
/// (empty blocks, negative costs).
void validate(const ModelProfile& profile);

/// Decision variables for one round: how many student blocks the device
/// trains, and the server GPU clock for the round.
struct CutPlan {
    int cut_index = 1;              // device-side student blocks, 1..blocks-1
    double gpu_frequency_hz = 0.0;  // server clock
};

/// Workload and traffic induced by a cut, for one batch (compute) plus the
/// per-round parameter upload.
struct WorkloadSplit {
    double device_flops = 0.0;  // forward + backward, device side
    double server_flops = 0.0;  // forward + backward, server side
    // Forward/backward shares of device_flops; they sum to device_flops
    // exactly and exist so the phase breakdown can report them separately.
    double device_flops_forward = 0.0;
    double device_flops_backward = 0.0;
    std::int64_t smashed_bytes_up = 0;
    std::int64_t gradient_bytes_down = 0;
    std::int64_t device_param_bytes_up = 0;
};

/// Builds a dense-transformer cost profile from dimensions alone.
///
/// Block forward FLOPs use the standard dense estimate
///   24 * seq_len * hidden_dim^2 + 4 * seq_len^2 * hidden_dim
/// and the block output activation is seq_len * hidden_dim * precision_bytes.
/// Embedding forward is a table lookup (2 * seq_len * hidden_dim FLOPs,
/// vocab * hidden_dim parameters); the head is a dense vocab projection
/// (2 * seq_len * hidden_dim * vocab FLOPs, vocab * hidden_dim parameters).
/// Backward costs default to 2x forward; the embedding of a frozen teacher
/// is priced forward-only by split_workload, not here.
ModelProfile build_transformer_profile(int hidden_dim, int num_blocks, int seq_len,
                                       int vocab, int precision_bytes,
                                       const std::string& name = "transformer");

/// Splits one round's work between device and server for a given cut.
///
/// Device side: teacher embedding forward (frozen) plus the student embedding
/// and blocks 1..c, forward and backward. Server side: the teacher's
/// remaining layers forward (frozen) plus student blocks c+1..N and head,
/// forward and backward. Smashed uplink traffic is the batch's activations at
/// the block-c boundary (compressed by activation_compression_ratio) plus the
/// teacher embedding output (uncompressed); gradient downlink traffic is the
/// uncompressed activation gradient at the same boundary; the parameter
/// upload covers the device-side student layers.
///
/// precision_bytes is the wire precision for boundary payloads; byte counts
/// are rescaled by precision_bytes / profile precision.
///
/// Throws std::invalid_argument for an out-of-range cut index or compression
/// ratio outside (0, 1].
WorkloadSplit split_workload(const ModelProfile& student, const ModelProfile& teacher,
                             const CutPlan& plan, int batch_size, int precision_bytes,
                             double activation_compression_ratio);

}  // namespace splitkd

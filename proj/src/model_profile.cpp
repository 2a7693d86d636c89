#include "splitkd/model_profile.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace splitkd {

namespace {

void require(bool ok, const std::string& what) {
    if (!ok) throw std::invalid_argument(what);
}

void validate_layer(const LayerProfile& layer, const std::string& where) {
    require(layer.flops_forward >= 0.0, where + ": negative forward FLOPs");
    require(layer.flops_backward >= 0.0, where + ": negative backward FLOPs");
    require(layer.param_bytes >= 0, where + ": negative param bytes");
    require(layer.activation_bytes_per_sample >= 0, where + ": negative activation bytes");
}

std::int64_t scaled_bytes(std::int64_t bytes, double scale) {
    return static_cast<std::int64_t>(std::llround(static_cast<double>(bytes) * scale));
}

}  // namespace

LayerProfile make_layer(double flops_forward, std::int64_t param_bytes,
                        std::int64_t activation_bytes_per_sample) {
    LayerProfile layer;
    layer.flops_forward = flops_forward;
    layer.flops_backward = 2.0 * flops_forward;
    layer.param_bytes = param_bytes;
    layer.activation_bytes_per_sample = activation_bytes_per_sample;
    return layer;
}

void validate(const ModelProfile& profile) {
    require(!profile.blocks.empty(), profile.name + ": profile has no blocks");
    require(profile.precision_bytes > 0, profile.name + ": precision_bytes must be positive");
    validate_layer(profile.embedding, profile.name + ".embedding");
    for (std::size_t i = 0; i < profile.blocks.size(); ++i)
        validate_layer(profile.blocks[i], profile.name + ".block[" + std::to_string(i) + "]");
    validate_layer(profile.head, profile.name + ".head");
}

ModelProfile build_transformer_profile(int hidden_dim, int num_blocks, int seq_len,
                                       int vocab, int precision_bytes,
                                       const std::string& name) {
    require(hidden_dim > 0 && num_blocks > 0 && seq_len > 0 && vocab > 0 && precision_bytes > 0,
            "build_transformer_profile: all arguments must be positive");

    const double h = hidden_dim;
    const double s = seq_len;
    const double v = vocab;

    ModelProfile profile;
    profile.name = name;
    profile.precision_bytes = precision_bytes;

    const std::int64_t token_act_bytes =
        static_cast<std::int64_t>(seq_len) * hidden_dim * precision_bytes;
    const std::int64_t vocab_param_bytes =
        static_cast<std::int64_t>(vocab) * hidden_dim * precision_bytes;

    // Embedding: table lookup, one row per token.
    profile.embedding = make_layer(2.0 * s * h, vocab_param_bytes, token_act_bytes);

    // Transformer block: dense attention + MLP estimate.
    const double block_flops = 24.0 * s * h * h + 4.0 * s * s * h;
    const std::int64_t block_param_bytes =
        static_cast<std::int64_t>(12.0 * h * h * precision_bytes);
    const LayerProfile block = make_layer(block_flops, block_param_bytes, token_act_bytes);
    profile.blocks.assign(static_cast<std::size_t>(num_blocks), block);

    // Head: dense projection onto the vocabulary.
    const std::int64_t logit_act_bytes =
        static_cast<std::int64_t>(seq_len) * vocab * precision_bytes;
    profile.head = make_layer(2.0 * s * h * v, vocab_param_bytes, logit_act_bytes);

    return profile;
}

WorkloadSplit split_workload(const ModelProfile& student, const ModelProfile& teacher,
                             const CutPlan& plan, int batch_size, int precision_bytes,
                             double activation_compression_ratio) {
    validate(student);
    validate(teacher);
    require(batch_size > 0, "split_workload: batch_size must be positive");
    require(precision_bytes > 0, "split_workload: precision_bytes must be positive");
    require(activation_compression_ratio > 0.0 && activation_compression_ratio <= 1.0,
            "split_workload: activation_compression_ratio must be in (0, 1]");
    const int cuts = student.block_count() - 1;
    if (plan.cut_index < 1 || plan.cut_index > cuts)
        throw std::invalid_argument("split_workload: cut_index " + std::to_string(plan.cut_index) +
                                    " out of range [1, " + std::to_string(cuts) + "]");

    const double batch = batch_size;
    const int c = plan.cut_index;

    WorkloadSplit split;

    // Device: frozen teacher embedding forward, plus the trainable
    // device-side student layers (embedding and blocks 1..c) forward+backward.
    double dev_fwd = teacher.embedding.flops_forward + student.embedding.flops_forward;
    double dev_bwd = student.embedding.flops_backward;
    for (int i = 0; i < c; ++i) {
        dev_fwd += student.blocks[static_cast<std::size_t>(i)].flops_forward;
        dev_bwd += student.blocks[static_cast<std::size_t>(i)].flops_backward;
    }
    split.device_flops_forward = batch * dev_fwd;
    split.device_flops_backward = batch * dev_bwd;
    split.device_flops = split.device_flops_forward + split.device_flops_backward;

    // Server: frozen teacher remaining layers forward, plus the server-side
    // student layers (blocks c+1..N and head) forward+backward.
    double srv = teacher.head.flops_forward;
    for (const LayerProfile& block : teacher.blocks) srv += block.flops_forward;
    for (int i = c; i < student.block_count(); ++i) {
        srv += student.blocks[static_cast<std::size_t>(i)].flops_forward;
        srv += student.blocks[static_cast<std::size_t>(i)].flops_backward;
    }
    srv += student.head.flops_forward + student.head.flops_backward;
    split.server_flops = batch * srv;

    // Traffic at the cut boundary. Wire precision may differ from the
    // precision the profiles were built at.
    const double student_scale = static_cast<double>(precision_bytes) / student.precision_bytes;
    const double teacher_scale = static_cast<double>(precision_bytes) / teacher.precision_bytes;
    const std::int64_t boundary_bytes =
        student.blocks[static_cast<std::size_t>(c - 1)].activation_bytes_per_sample;
    const std::int64_t smashed_compressed = scaled_bytes(
        boundary_bytes, batch * student_scale * activation_compression_ratio);
    const std::int64_t teacher_embed_out =
        scaled_bytes(teacher.embedding.activation_bytes_per_sample, batch * teacher_scale);
    split.smashed_bytes_up = smashed_compressed + teacher_embed_out;
    split.gradient_bytes_down = scaled_bytes(boundary_bytes, batch * student_scale);

    std::int64_t params = student.embedding.param_bytes;
    for (int i = 0; i < c; ++i) params += student.blocks[static_cast<std::size_t>(i)].param_bytes;
    split.device_param_bytes_up = params;

    return split;
}

}  // namespace splitkd

#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "splitkd/model_profile.hpp"

namespace splitkd {

/// Compute and radio characteristics of one IoT device. Devices always run
/// at max_gpu_freq_hz; only the server frequency-scales.
struct DeviceProfile {
    std::string name;
    double max_gpu_freq_hz = 0.0;
    int cores = 0;
    double flops_per_cycle_per_core = 2.0;
    double compute_utilization = 0.4;
    double effective_capacitance = 0.0;  // J*s^2/cycle (kappa_d)
    double static_power_w = 0.0;
    double tx_power_w = 0.0;
    double rx_power_w = 0.0;
};

/// Edge-server characteristics including the discrete DVFS levels the
/// planner searches over.
struct ServerProfile {
    std::string name;
    std::vector<double> freq_levels_hz;  // strictly increasing
    int cores = 0;
    double flops_per_cycle_per_core = 2.0;
    double compute_utilization = 0.4;
    double effective_capacitance = 0.0;  // kappa_s
    double static_power_w = 0.0;
    double tx_power_w = 0.0;
    double rx_power_w = 0.0;

    double max_freq_hz() const {
        return freq_levels_hz.empty() ? 0.0 : freq_levels_hz.back();
    }
};

void validate(const DeviceProfile& device);
void validate(const ServerProfile& server);

/// Generates count evenly spaced DVFS levels from lo_fraction*max to max.
std::vector<double> make_freq_levels(double max_freq_hz, int count, double lo_fraction);

enum class Phase {
    device_forward = 0,
    uplink_smashed = 1,
    server_forward_backward = 2,
    downlink_gradients = 3,
    device_backward = 4,
    uplink_params = 5,
};

constexpr int kPhaseCount = 6;

const char* phase_name(Phase phase);

struct PhaseCost {
    Phase phase = Phase::device_forward;
    double delay_s = 0.0;
    double energy_j = 0.0;
};

/// Raised when a transfer is requested over a zero-bitrate link; the round is
/// infeasible at this instant rather than erroneous.
class LinkOutageError : public std::runtime_error {
  public:
    explicit LinkOutageError(const std::string& what) : std::runtime_error(what) {}
};

struct CostOptions {
    bool include_server_static_energy = true;
};

/// flops / (freq * cores * flops_per_cycle_per_core * utilization).
double compute_time_s(double flops, double freq_hz, int cores,
                      double flops_per_cycle_per_core, double utilization);

/// Effective-capacitance DVFS energy: kappa * cycles * freq^2 plus static
/// power over the compute time, with cycles = flops / (cores * fpc * util).
double compute_energy_j(double flops, double freq_hz, int cores,
                        double flops_per_cycle_per_core, double utilization,
                        double effective_capacitance, double static_power_w);

/// Transfer cost of one payload: delay 8*bytes/bitrate; sender and receiver
/// energies are their radio powers over that delay. Throws LinkOutageError
/// for bytes > 0 on a zero-bitrate link.
std::pair<PhaseCost, PhaseCost> comm_cost(std::int64_t bytes, double bitrate_bps,
                                          double tx_power_w, double rx_power_w,
                                          Phase phase);

/// Delay and energy of one training round. Buckets are disjoint:
/// device/server cover compute only, comm covers all radio energy, and
/// total = device + server + comm with no hidden terms.
struct RoundMetrics {
    double delay_s = 0.0;
    double device_energy_j = 0.0;
    double server_energy_j = 0.0;
    double comm_energy_j = 0.0;
    double total_energy_j = 0.0;
    // Radio split of comm_energy_j by endpoint (informational).
    double device_radio_energy_j = 0.0;
    double server_radio_energy_j = 0.0;
    CutPlan plan;
    std::array<PhaseCost, kPhaseCount> phases{};  // round totals per phase
};

/// Prices a full round: the five batch phases (device forward, smashed
/// uplink, server forward+backward, gradient downlink, device backward)
/// repeat local_epochs * batches_per_epoch times, strictly sequentially; the
/// parameter upload happens once per round. Server compute runs at
/// plan.gpu_frequency_hz, device compute at device.max_gpu_freq_hz.
RoundMetrics round_cost(const WorkloadSplit& split, const DeviceProfile& device,
                        const ServerProfile& server, const CutPlan& plan,
                        double bitrate_up_bps, double bitrate_down_bps,
                        int local_epochs, int batches_per_epoch,
                        const CostOptions& options = {});

}  // namespace splitkd

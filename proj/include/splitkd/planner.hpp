#pragma once

#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "splitkd/cost_model.hpp"
#include "splitkd/model_profile.hpp"

namespace splitkd {

/// One device-round decision context: the models, the hardware, and a channel
/// snapshot taken at round start. Bitrate 0 means the link is in outage.
struct PlanningProblem {
    DeviceProfile device;
    ServerProfile server;
    ModelProfile student;
    ModelProfile teacher;
    double bitrate_up_bps = 0.0;
    double bitrate_down_bps = 0.0;
    double delay_budget_s = std::numeric_limits<double>::infinity();
    int local_epochs = 1;
    int batches_per_epoch = 1;
    int batch_size = 1;
    int wire_precision_bytes = 2;
    double activation_compression_ratio = 1.0;
    CostOptions cost_options;
};

void validate(const PlanningProblem& problem);

struct PlanResult {
    CutPlan plan;
    // absent only when every candidate hit a link outage
    std::optional<RoundMetrics> metrics;
    bool feasible = false;
    int evaluated_candidates = 0;
};

/// Cartesian product of cut indices 1..blocks-1 and the server frequency
/// levels, cut ascending then frequency ascending.
std::vector<CutPlan> enumerate_candidates(const PlanningProblem& problem);

/// Exhaustive search: minimum total energy among candidates within the delay
/// budget; ties broken by lower delay, then lower cut, then lower frequency.
/// With no feasible candidate, returns the minimum-delay candidate as a
/// diagnostic with feasible=false.
PlanResult optimize(const PlanningProblem& problem);

enum class BaselineMode {
    server_only,  // cut after the first block
    device_only,  // device keeps all but the last block
};

/// Fixed-cut baseline at maximum server frequency (no frequency scaling).
PlanResult baseline(const PlanningProblem& problem, BaselineMode mode);

enum class SchedulingPolicy {
    round_robin,
    best_channel_first,
};

/// Index of the device to serve next. round_robin picks the lowest unserved
/// index; best_channel_first picks the unserved device with the highest
/// uplink bitrate, ties by index. Throws when every device is served.
int select_next_device(std::span<const double> uplink_bitrates_bps,
                       std::span<const bool> served, SchedulingPolicy policy);

}  // namespace splitkd

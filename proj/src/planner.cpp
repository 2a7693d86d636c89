#include "splitkd/planner.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace splitkd {

namespace {

void require(bool ok, const std::string& message) {
    if (!ok) throw std::invalid_argument(message);
}

WorkloadSplit split_for(const PlanningProblem& problem, int cut_index) {
    CutPlan plan;
    plan.cut_index = cut_index;
    return split_workload(problem.student, problem.teacher, plan, problem.batch_size,
                          problem.wire_precision_bytes,
                          problem.activation_compression_ratio);
}

struct Candidate {
    CutPlan plan;
    RoundMetrics metrics;
};

// strict improvement under the (energy, delay) order; iteration order
// (cut asc, freq asc) supplies the remaining tie-break levels
bool better_energy(const RoundMetrics& a, const RoundMetrics& b) {
    if (a.total_energy_j != b.total_energy_j) return a.total_energy_j < b.total_energy_j;
    return a.delay_s < b.delay_s;
}

}  // namespace

void validate(const PlanningProblem& problem) {
    validate(problem.device);
    validate(problem.server);
    validate(problem.student);
    validate(problem.teacher);
    require(problem.student.block_count() >= 2,
            "planning problem: student needs at least 2 blocks to cut between");
    require(problem.bitrate_up_bps >= 0.0 && problem.bitrate_down_bps >= 0.0,
            "planning problem: bitrates must be nonnegative");
    require(problem.delay_budget_s > 0.0, "planning problem: delay budget must be positive");
    require(problem.local_epochs >= 1, "planning problem: local_epochs must be at least 1");
    require(problem.batches_per_epoch >= 1,
            "planning problem: batches_per_epoch must be at least 1");
    require(problem.batch_size >= 1, "planning problem: batch_size must be at least 1");
    require(problem.wire_precision_bytes >= 1,
            "planning problem: wire_precision_bytes must be at least 1");
    require(problem.activation_compression_ratio > 0.0 &&
                problem.activation_compression_ratio <= 1.0,
            "planning problem: activation_compression_ratio must be in (0, 1]");
}

std::vector<CutPlan> enumerate_candidates(const PlanningProblem& problem) {
    validate(problem);
    const int cuts = problem.student.block_count() - 1;
    std::vector<CutPlan> out;
    out.reserve(static_cast<std::size_t>(cuts) * problem.server.freq_levels_hz.size());
    for (int c = 1; c <= cuts; ++c) {
        for (double f : problem.server.freq_levels_hz) {
            CutPlan plan;
            plan.cut_index = c;
            plan.gpu_frequency_hz = f;
            out.push_back(plan);
        }
    }
    return out;
}

PlanResult optimize(const PlanningProblem& problem) {
    validate(problem);
    const int cuts = problem.student.block_count() - 1;

    PlanResult result;
    std::optional<Candidate> best_feasible;
    std::optional<Candidate> min_delay;

    for (int c = 1; c <= cuts; ++c) {
        const WorkloadSplit split = split_for(problem, c);
        for (double f : problem.server.freq_levels_hz) {
            CutPlan plan;
            plan.cut_index = c;
            plan.gpu_frequency_hz = f;
            RoundMetrics metrics;
            try {
                metrics = round_cost(split, problem.device, problem.server, plan,
                                     problem.bitrate_up_bps, problem.bitrate_down_bps,
                                     problem.local_epochs, problem.batches_per_epoch,
                                     problem.cost_options);
            } catch (const LinkOutageError&) {
                continue;  // candidate unreachable at this snapshot
            }
            ++result.evaluated_candidates;

            if (!min_delay || metrics.delay_s < min_delay->metrics.delay_s) {
                min_delay = Candidate{plan, metrics};
            }
            if (metrics.delay_s <= problem.delay_budget_s &&
                (!best_feasible || better_energy(metrics, best_feasible->metrics))) {
                best_feasible = Candidate{plan, metrics};
            }
        }
    }

    if (best_feasible) {
        result.plan = best_feasible->plan;
        result.metrics = best_feasible->metrics;
        result.feasible = true;
    } else if (min_delay) {
        result.plan = min_delay->plan;
        result.metrics = min_delay->metrics;
        result.feasible = false;
    }
    return result;
}

PlanResult baseline(const PlanningProblem& problem, BaselineMode mode) {
    validate(problem);
    CutPlan plan;
    plan.cut_index = mode == BaselineMode::server_only ? 1 : problem.student.block_count() - 1;
    plan.gpu_frequency_hz = problem.server.max_freq_hz();

    PlanResult result;
    result.plan = plan;
    try {
        const RoundMetrics metrics =
            round_cost(split_for(problem, plan.cut_index), problem.device, problem.server,
                       plan, problem.bitrate_up_bps, problem.bitrate_down_bps,
                       problem.local_epochs, problem.batches_per_epoch,
                       problem.cost_options);
        result.metrics = metrics;
        result.evaluated_candidates = 1;
        result.feasible = metrics.delay_s <= problem.delay_budget_s;
    } catch (const LinkOutageError&) {
        result.feasible = false;
    }
    return result;
}

int select_next_device(std::span<const double> uplink_bitrates_bps,
                       std::span<const bool> served, SchedulingPolicy policy) {
    require(!uplink_bitrates_bps.empty(), "select_next_device: empty device set");
    require(uplink_bitrates_bps.size() == served.size(),
            "select_next_device: bitrate/served size mismatch");

    int chosen = -1;
    for (std::size_t i = 0; i < served.size(); ++i) {
        if (served[i]) continue;
        if (chosen < 0) {
            chosen = static_cast<int>(i);
            if (policy == SchedulingPolicy::round_robin) break;
            continue;
        }
        if (policy == SchedulingPolicy::best_channel_first &&
            uplink_bitrates_bps[i] > uplink_bitrates_bps[static_cast<std::size_t>(chosen)]) {
            chosen = static_cast<int>(i);
        }
    }
    if (chosen < 0) {
        throw std::invalid_argument("select_next_device: all devices already served");
    }
    return chosen;
}

}  // namespace splitkd

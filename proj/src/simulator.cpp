#include "splitkd/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <span>
#include <stdexcept>

namespace splitkd {

namespace {

void require(bool ok, const std::string& message) {
    if (!ok) throw std::invalid_argument(message);
}

double clamp_to_trajectory(const Trajectory& trajectory, double t) {
    return std::clamp(t, 0.0, trajectory.duration_s);
}

PlanningProblem make_problem(const Scenario& scenario, const DeviceProfile& device,
                             const LinkState& link) {
    PlanningProblem problem;
    problem.device = device;
    problem.server = scenario.server;
    problem.student = scenario.student;
    problem.teacher = scenario.teacher;
    problem.bitrate_up_bps = link.bitrate_up_bps;
    problem.bitrate_down_bps = link.bitrate_down_bps;
    problem.delay_budget_s = scenario.training.delay_budget_s;
    problem.local_epochs = scenario.training.local_epochs;
    problem.batches_per_epoch = scenario.training.batches_per_epoch;
    problem.batch_size = scenario.training.batch_size;
    problem.wire_precision_bytes = scenario.training.wire_precision_bytes;
    problem.activation_compression_ratio = scenario.training.activation_compression_ratio;
    problem.cost_options.include_server_static_energy =
        scenario.training.include_server_static_energy;
    return problem;
}

void accumulate(TrialAggregates& agg, const std::vector<RoundRecord>& rounds) {
    agg.total_rounds = static_cast<int>(rounds.size());
    for (const RoundRecord& r : rounds) {
        if (!r.feasible || !r.metrics) {
            ++agg.infeasible_rounds;
            continue;
        }
        ++agg.feasible_rounds;
        agg.sum_delay_s += r.metrics->delay_s;
        agg.mean_total_energy_j += r.metrics->total_energy_j;
        agg.mean_device_energy_j += r.metrics->device_energy_j;
        agg.mean_server_energy_j += r.metrics->server_energy_j;
        agg.mean_comm_energy_j += r.metrics->comm_energy_j;
    }
    if (agg.feasible_rounds > 0) {
        const double n = agg.feasible_rounds;
        agg.mean_delay_s = agg.sum_delay_s / n;
        agg.mean_total_energy_j /= n;
        agg.mean_device_energy_j /= n;
        agg.mean_server_energy_j /= n;
        agg.mean_comm_energy_j /= n;
    }
}

double reduction(double baseline, double proposed) {
    if (!(baseline > 0.0)) return std::numeric_limits<double>::quiet_NaN();
    return (baseline - proposed) / baseline;
}

}  // namespace

const char* method_name(Method method) {
    switch (method) {
        case Method::proposed: return "proposed";
        case Method::server_only: return "server-only";
        case Method::device_only: return "device-only";
    }
    throw std::invalid_argument("method_name: unknown method");
}

Method parse_method(const std::string& name) {
    if (name == "proposed") return Method::proposed;
    if (name == "server-only" || name == "server_only") return Method::server_only;
    if (name == "device-only" || name == "device_only") return Method::device_only;
    throw std::invalid_argument("unknown method '" + name +
                                "' (expected proposed|server-only|device-only)");
}

const std::vector<std::string>& regime_names() {
    static const std::vector<std::string> names{"good", "normal", "poor"};
    return names;
}

void validate(const Scenario& scenario) {
    require(!scenario.name.empty(), "scenario: name must be non-empty");
    require(scenario.schema_version == 1, "scenario: unsupported schema_version");
    require(!scenario.devices.empty(), "scenario: at least one device required");
    for (const DeviceNode& node : scenario.devices) {
        validate(node.profile);
        validate(node.trajectory);
    }
    validate(scenario.server);
    validate(scenario.student);
    validate(scenario.teacher);
    require(scenario.student.block_count() >= 2,
            "scenario: student needs at least 2 blocks");
    validate(scenario.channel);
    for (const std::string& name : regime_names()) {
        require(scenario.regimes.count(name) == 1,
                "scenario: regimes must define '" + name + "'");
    }
    require(scenario.regimes.size() == regime_names().size(),
            "scenario: regimes must be exactly good/normal/poor");

    const TrainingConfig& t = scenario.training;
    require(t.rounds_per_device >= 0, "scenario: rounds_per_device must be nonnegative");
    require(t.local_epochs >= 1, "scenario: local_epochs must be at least 1");
    require(t.batches_per_epoch >= 1, "scenario: batches_per_epoch must be at least 1");
    require(t.batch_size >= 1, "scenario: batch_size must be at least 1");
    require(t.wire_precision_bytes >= 1,
            "scenario: wire_precision_bytes must be at least 1");
    require(t.activation_compression_ratio > 0.0 && t.activation_compression_ratio <= 1.0,
            "scenario: activation_compression_ratio must be in (0, 1]");
    require(t.delay_budget_s > 0.0, "scenario: delay_budget_s must be positive");
    require(t.outage_retry_s > 0.0, "scenario: outage_retry_s must be positive");
}

ChannelModel channel_for_regime(const Scenario& scenario, const std::string& regime) {
    const auto it = scenario.regimes.find(regime);
    if (it == scenario.regimes.end()) {
        throw std::invalid_argument("unknown regime '" + regime +
                                    "' (expected good|normal|poor)");
    }
    ChannelModel channel = scenario.channel;
    channel.noise_density_dbm_per_hz = it->second;
    return channel;
}

RoundRecord run_round(const Scenario& scenario, const ChannelModel& channel,
                      int device_index, double t_start_s, Method method,
                      std::uint64_t shadow_index) {
    require(device_index >= 0 &&
                static_cast<std::size_t>(device_index) < scenario.devices.size(),
            "run_round: device index out of range");
    const DeviceNode& node = scenario.devices[static_cast<std::size_t>(device_index)];

    RoundRecord record;
    record.device_index = device_index;
    record.t_start_s = t_start_s;

    const double t = clamp_to_trajectory(node.trajectory, t_start_s);
    const double distance = distance_at(node.trajectory, t);
    const double shadow = channel.shadowing_sigma_db > 0.0
                              ? shadowing_db(channel.shadowing_sigma_db, scenario.seed,
                                             shadow_index)
                              : 0.0;
    record.link = link_state(channel, distance, shadow);

    const PlanningProblem problem = make_problem(scenario, node.profile, record.link);
    PlanResult result;
    switch (method) {
        case Method::proposed: result = optimize(problem); break;
        case Method::server_only: result = baseline(problem, BaselineMode::server_only); break;
        case Method::device_only: result = baseline(problem, BaselineMode::device_only); break;
    }
    record.plan = result.plan;
    record.feasible = result.feasible;
    record.outage = !result.metrics.has_value();
    record.evaluated_candidates = result.evaluated_candidates;
    record.metrics = std::move(result.metrics);
    return record;
}

TrialReport run_trial(const Scenario& scenario, const std::string& regime, Method method) {
    validate(scenario);
    const ChannelModel channel = channel_for_regime(scenario, regime);

    TrialReport report;
    report.scenario_name = scenario.name;
    report.seed = scenario.seed;
    report.method = method;
    report.regime = regime;
    report.noise_density_dbm_per_hz = channel.noise_density_dbm_per_hz;

    const std::size_t device_count = scenario.devices.size();
    // plain bool storage: vector<bool> cannot back a span<const bool>
    const std::unique_ptr<bool[]> served(new bool[device_count]());
    std::vector<double> bitrates(device_count, 0.0);
    double clock = 0.0;
    std::uint64_t shadow_index = 0;

    for (std::size_t slot = 0; slot < device_count; ++slot) {
        for (std::size_t i = 0; i < device_count; ++i) {
            if (served[i]) continue;
            const Trajectory& trajectory = scenario.devices[i].trajectory;
            const double d = distance_at(trajectory, clamp_to_trajectory(trajectory, clock));
            bitrates[i] = link_state(channel, d).bitrate_up_bps;
        }
        const int idx = select_next_device(
            bitrates, std::span<const bool>(served.get(), device_count),
            scenario.training.policy);
        served[static_cast<std::size_t>(idx)] = true;

        for (int r = 0; r < scenario.training.rounds_per_device; ++r) {
            RoundRecord record = run_round(scenario, channel, idx, clock, method,
                                           shadow_index++);
            record.round_index = r;
            if (record.feasible && record.metrics) {
                clock += record.metrics->delay_s;
            } else {
                clock += scenario.training.outage_retry_s;
            }
            report.rounds.push_back(std::move(record));
        }
    }

    accumulate(report.aggregates, report.rounds);
    report.aggregates.wall_clock_s = clock;
    return report;
}

ComparisonTable compare_methods(const Scenario& scenario,
                                const std::vector<std::string>& regimes) {
    validate(scenario);
    require(!regimes.empty(), "compare_methods: no regimes requested");

    ComparisonTable table;
    table.scenario_name = scenario.name;
    table.seed = scenario.seed;

    for (const std::string& regime : regimes) {
        MethodComparison row;
        row.regime = regime;

        TrialReport proposed = run_trial(scenario, regime, Method::proposed);
        TrialReport server_only = run_trial(scenario, regime, Method::server_only);
        TrialReport device_only = run_trial(scenario, regime, Method::device_only);

        row.proposed = proposed.aggregates;
        row.server_only = server_only.aggregates;
        row.device_only = device_only.aggregates;
        row.delay_reduction_vs_server_only =
            reduction(row.server_only.mean_delay_s, row.proposed.mean_delay_s);
        row.delay_reduction_vs_device_only =
            reduction(row.device_only.mean_delay_s, row.proposed.mean_delay_s);
        row.energy_reduction_vs_server_only =
            reduction(row.server_only.mean_total_energy_j, row.proposed.mean_total_energy_j);
        row.energy_reduction_vs_device_only =
            reduction(row.device_only.mean_total_energy_j, row.proposed.mean_total_energy_j);

        table.regimes.push_back(row);
        table.trials.push_back(std::move(proposed));
        table.trials.push_back(std::move(server_only));
        table.trials.push_back(std::move(device_only));
    }
    return table;
}

}  // namespace splitkd

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "splitkd/channel.hpp"
#include "splitkd/cost_model.hpp"
#include "splitkd/model_profile.hpp"
#include "splitkd/planner.hpp"

namespace splitkd {

enum class Method {
    proposed,
    server_only,
    device_only,
};

const char* method_name(Method method);       // "proposed", "server-only", "device-only"
Method parse_method(const std::string& name);

struct TrainingConfig {
    int rounds_per_device = 1;  // 0 allowed: empty trial
    int local_epochs = 1;
    int batches_per_epoch = 1;
    int batch_size = 1;
    int wire_precision_bytes = 2;
    double activation_compression_ratio = 1.0;
    double delay_budget_s = 0.0;
    SchedulingPolicy policy = SchedulingPolicy::round_robin;
    bool include_server_static_energy = true;
    // clock advance when a round cannot run (outage or budget violation)
    double outage_retry_s = 1.0;
};

struct DeviceNode {
    DeviceProfile profile;
    Trajectory trajectory;
};

struct Scenario {
    std::string name;
    int schema_version = 1;
    std::uint64_t seed = 0;
    std::vector<DeviceNode> devices;
    ServerProfile server;
    ModelProfile student;
    ModelProfile teacher;
    ChannelModel channel;  // noise density here is overridden per regime
    // regime name -> noise power density (dBm/Hz); keys: good, normal, poor
    std::map<std::string, double> regimes;
    TrainingConfig training;
};

void validate(const Scenario& scenario);

/// Names of the regimes a scenario must define, in report order.
const std::vector<std::string>& regime_names();

/// The scenario's channel with the given regime's noise density applied.
ChannelModel channel_for_regime(const Scenario& scenario, const std::string& regime);

struct RoundRecord {
    int device_index = 0;
    int round_index = 0;  // within the device's service block
    double t_start_s = 0.0;
    LinkState link;
    bool feasible = false;
    bool outage = false;  // no candidate could communicate at all
    CutPlan plan;
    int evaluated_candidates = 0;
    std::optional<RoundMetrics> metrics;  // absent on outage
};

struct TrialAggregates {
    int total_rounds = 0;
    int feasible_rounds = 0;
    int infeasible_rounds = 0;
    // means over feasible rounds only; 0 when none
    double mean_delay_s = 0.0;
    double mean_total_energy_j = 0.0;
    double mean_device_energy_j = 0.0;
    double mean_server_energy_j = 0.0;
    double mean_comm_energy_j = 0.0;
    double sum_delay_s = 0.0;    // over feasible rounds
    double wall_clock_s = 0.0;   // sum_delay_s plus retry time of skipped rounds
};

struct TrialReport {
    std::string scenario_name;
    std::uint64_t seed = 0;
    Method method = Method::proposed;
    std::string regime;
    double noise_density_dbm_per_hz = 0.0;
    std::vector<RoundRecord> rounds;
    TrialAggregates aggregates;
};

/// One device-round at simulated time t_start: snapshot the channel, plan
/// (optimize for proposed, fixed cut for baselines), and price the round.
RoundRecord run_round(const Scenario& scenario, const ChannelModel& channel,
                      int device_index, double t_start_s, Method method,
                      std::uint64_t shadow_index);

/// Full trial: devices served strictly one after another in scheduler order,
/// each running all its rounds back to back; the clock advances by every
/// executed round's delay (or by outage_retry_s when a round cannot run).
TrialReport run_trial(const Scenario& scenario, const std::string& regime, Method method);

struct MethodComparison {
    std::string regime;
    TrialAggregates proposed;
    TrialAggregates server_only;
    TrialAggregates device_only;
    // (baseline - proposed) / baseline; NaN when the baseline mean is zero
    double delay_reduction_vs_server_only = 0.0;
    double delay_reduction_vs_device_only = 0.0;
    double energy_reduction_vs_server_only = 0.0;
    double energy_reduction_vs_device_only = 0.0;
};

struct ComparisonTable {
    std::string scenario_name;
    std::uint64_t seed = 0;
    std::vector<MethodComparison> regimes;
    std::vector<TrialReport> trials;  // all method x regime runs, in emission order
};

/// Runs proposed, server-only, and device-only on the identical scenario and
/// seed for each requested regime.
ComparisonTable compare_methods(const Scenario& scenario,
                                const std::vector<std::string>& regimes);

}  // namespace splitkd

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "splitkd/kd_numerics.hpp"
#include "splitkd/scenario_io.hpp"

namespace {

using namespace splitkd;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitInfeasible = 2;

std::string num9(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return buf;
}

bool infeasible_everywhere(const TrialAggregates& agg) {
    return agg.total_rounds > 0 && agg.feasible_rounds == 0;
}

void print_aggregates(const char* label, const TrialAggregates& agg) {
    std::cout << label << ": rounds=" << agg.total_rounds
              << " feasible=" << agg.feasible_rounds
              << " mean_delay_s=" << num9(agg.mean_delay_s)
              << " mean_energy_j=" << num9(agg.mean_total_energy_j)
              << " (device=" << num9(agg.mean_device_energy_j)
              << " server=" << num9(agg.mean_server_energy_j)
              << " comm=" << num9(agg.mean_comm_energy_j) << ")\n";
}

std::vector<std::string> regimes_for(const std::string& regime) {
    if (regime == "all") return regime_names();
    return {regime};
}

int cmd_run(const std::string& scenario_path, const std::string& regime,
            const std::string& method_str, const std::string& out_dir,
            const std::uint64_t* seed_override) {
    Scenario scenario = load_scenario(scenario_path);
    if (seed_override) scenario.seed = *seed_override;
    const Method method = parse_method(method_str);

    const TrialReport trial = run_trial(scenario, regime, method);
    if (!out_dir.empty()) {
        std::filesystem::create_directories(out_dir);
        const std::string path = out_dir + "/rows_run_" + std::string(method_name(method)) +
                                 "_" + regime + ".csv";
        write_file_atomic(path, emit_rows({trial}));
        std::cout << "rows written: " << path << '\n';
    }
    std::cout << "scenario=" << scenario.name << " seed=" << scenario.seed
              << " regime=" << regime << " method=" << method_name(method) << '\n';
    print_aggregates("trial", trial.aggregates);
    return infeasible_everywhere(trial.aggregates) ? kExitInfeasible : kExitOk;
}

int cmd_compare(const std::string& scenario_path, const std::string& regime,
                const std::string& out_dir, const std::uint64_t* seed_override) {
    Scenario scenario = load_scenario(scenario_path);
    if (seed_override) scenario.seed = *seed_override;

    const ComparisonTable table = compare_methods(scenario, regimes_for(regime));
    const std::string summary = emit_summary(table, scenario);
    if (!out_dir.empty()) {
        std::filesystem::create_directories(out_dir);
        write_file_atomic(out_dir + "/rows.csv", emit_rows(table.trials));
        write_file_atomic(out_dir + "/summary.txt", summary);
        std::cout << "reports written: " << out_dir << "/rows.csv, " << out_dir
                  << "/summary.txt\n";
    }
    std::cout << summary;
    for (const TrialReport& trial : table.trials) {
        if (infeasible_everywhere(trial.aggregates)) return kExitInfeasible;
    }
    return kExitOk;
}

int cmd_plan(const std::string& scenario_path, const std::string& regime, int device_index,
             double distance_m, bool distance_set, const std::uint64_t* seed_override) {
    Scenario scenario = load_scenario(scenario_path);
    if (seed_override) scenario.seed = *seed_override;
    if (device_index < 0 || static_cast<std::size_t>(device_index) >= scenario.devices.size()) {
        std::cerr << "device index out of range (scenario has " << scenario.devices.size()
                  << " devices)\n";
        return kExitUsage;
    }
    const DeviceNode& node = scenario.devices[static_cast<std::size_t>(device_index)];
    const ChannelModel channel = channel_for_regime(scenario, regime);
    const double d = distance_set ? distance_m : distance_at(node.trajectory, 0.0);
    const LinkState link = link_state(channel, d);

    PlanningProblem problem;
    problem.device = node.profile;
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

    std::cout << "device=" << node.profile.name << " regime=" << regime
              << " distance_m=" << num9(d) << " cqi_up=" << link.cqi_up
              << " cqi_down=" << link.cqi_down << " bitrate_up_bps="
              << num9(link.bitrate_up_bps) << " bitrate_down_bps="
              << num9(link.bitrate_down_bps) << '\n';

    struct Row {
        const char* label;
        PlanResult result;
    };
    const Row rows[] = {
        {"proposed", optimize(problem)},
        {"server-only", baseline(problem, BaselineMode::server_only)},
        {"device-only", baseline(problem, BaselineMode::device_only)},
    };
    for (const Row& row : rows) {
        std::cout << row.label << ": cut=" << row.result.plan.cut_index
                  << " freq_hz=" << num9(row.result.plan.gpu_frequency_hz)
                  << " feasible=" << (row.result.feasible ? 1 : 0)
                  << " candidates=" << row.result.evaluated_candidates;
        if (row.result.metrics) {
            std::cout << " delay_s=" << num9(row.result.metrics->delay_s)
                      << " energy_j=" << num9(row.result.metrics->total_energy_j);
        } else {
            std::cout << " (link outage: no candidate evaluable)";
        }
        std::cout << '\n';
    }
    const bool any_usable = rows[0].result.feasible || rows[1].result.feasible ||
                            rows[2].result.feasible;
    return any_usable ? kExitOk : kExitInfeasible;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"split knowledge distillation planner and trial simulator"};
    app.require_subcommand(1);

    std::string scenario_path;
    std::string regime = "all";
    std::string method = "proposed";
    std::string out_dir;
    std::uint64_t seed = 0;

    auto add_common = [&](CLI::App* cmd, bool with_method) {
        cmd->add_option("--scenario", scenario_path, "scenario JSON file")
            ->required()
            ->check(CLI::ExistingFile);
        cmd->add_option("--regime", regime, "channel regime")
            ->check(CLI::IsMember({"good", "normal", "poor", "all"}));
        if (with_method) {
            cmd->add_option("--method", method, "training method")
                ->check(CLI::IsMember({"proposed", "server-only", "device-only"}));
        }
        return cmd->add_option("--seed", seed, "override the scenario seed");
    };

    CLI::App* run = app.add_subcommand("run", "one method on one regime");
    CLI::Option* run_seed = add_common(run, true);
    run->add_option("--out", out_dir, "directory for the rows report");

    CLI::App* compare = app.add_subcommand("compare", "all three methods across regimes");
    CLI::Option* compare_seed = add_common(compare, false);
    compare->add_option("--out", out_dir, "directory for rows and summary reports");

    CLI::App* plan = app.add_subcommand("plan", "one-shot planner query for a snapshot");
    CLI::Option* plan_seed = add_common(plan, false);
    int device_index = 0;
    double distance_m = 0.0;
    plan->add_option("--device", device_index, "device index in the scenario");
    CLI::Option* plan_distance =
        plan->add_option("--distance", distance_m, "distance to the server in meters");

    CLI::App* selftest = app.add_subcommand("kd-selftest", "distillation numerics properties");
    std::uint64_t selftest_seed = 12345;
    selftest->add_option("--seed", selftest_seed, "property-test seed");

    CLI::App* catalog = app.add_subcommand("catalog", "distillation results catalog");
    std::string catalog_path = "data/kd_catalog.csv";
    catalog->add_option("--file", catalog_path, "catalog CSV path");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);  // prints the message or the help text
        return code == 0 ? kExitOk : kExitUsage;
    }

    // run and plan are single-regime commands: explicit "all" is a usage
    // error, while an omitted --regime defaults to normal
    auto single_regime = [&](CLI::App* cmd) -> const char* {
        if (cmd->get_option("--regime")->count() == 0) return "normal";
        if (regime == "all") {
            std::cerr << cmd->get_name() << " takes a single regime (good|normal|poor)\n";
            return nullptr;
        }
        return regime.c_str();
    };

    try {
        if (run->parsed()) {
            const char* r = single_regime(run);
            if (!r) return kExitUsage;
            return cmd_run(scenario_path, r, method, out_dir,
                           run_seed->count() ? &seed : nullptr);
        }
        if (compare->parsed()) {
            return cmd_compare(scenario_path, regime, out_dir,
                               compare_seed->count() ? &seed : nullptr);
        }
        if (plan->parsed()) {
            const char* r = single_regime(plan);
            if (!r) return kExitUsage;
            return cmd_plan(scenario_path, r, device_index, distance_m,
                            plan_distance->count() > 0, plan_seed->count() ? &seed : nullptr);
        }
        if (selftest->parsed()) {
            const SelfTestReport report = kd_selftest(selftest_seed);
            std::cout << format_report(report);
            return report.passed ? kExitOk : kExitUsage;
        }
        if (catalog->parsed()) {
            std::cout << format_catalog(load_catalog(catalog_path));
            return kExitOk;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    }
    return kExitUsage;
}

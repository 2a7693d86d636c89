#include <doctest.h>

#include <stdexcept>
#include <string>

#include "splitkd/cost_model.hpp"
#include "splitkd/model_profile.hpp"

using namespace splitkd;

namespace {

DeviceProfile orin_device() {
    DeviceProfile d;
    d.name = "Jetson AGX Orin";
    d.max_gpu_freq_hz = 1.3e9;
    d.cores = 2048;
    d.flops_per_cycle_per_core = 2.0;
    d.compute_utilization = 0.4;
    d.effective_capacitance = 2.0e-26;
    d.static_power_w = 5.0;
    d.tx_power_w = 2.0;
    d.rx_power_w = 1.5;
    return d;
}

ServerProfile edge_server() {
    ServerProfile s;
    s.name = "edge";
    s.freq_levels_hz = make_freq_levels(2.52e9, 8, 0.4);
    s.cores = 16384;
    s.flops_per_cycle_per_core = 2.0;
    s.compute_utilization = 0.4;
    s.effective_capacitance = 2.8e-26;
    s.static_power_w = 80.0;
    s.tx_power_w = 10.0;
    s.rx_power_w = 4.0;
    return s;
}

}  // namespace

TEST_CASE("compute time is flops over the effective rate") {
    CHECK(compute_time_s(1.0, 1.0, 1, 1.0, 1.0) == 1.0);
    CHECK(compute_time_s(0.0, 2.0e9, 64, 2.0, 0.5) == 0.0);

    // 1e12 flops on an AGX Orin style GPU
    const double t = compute_time_s(1.0e12, 1.3e9, 2048, 2.0, 0.4);
    CHECK(t == doctest::Approx(0.4695012019230769).epsilon(1e-14));
    // doubling the clock halves the time
    CHECK(compute_time_s(1.0e12, 2.6e9, 2048, 2.0, 0.4) == doctest::Approx(t / 2.0).epsilon(1e-14));

    CHECK_THROWS_AS(compute_time_s(1.0, 0.0, 1, 1.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(compute_time_s(1.0, 1.0, 0, 1.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(compute_time_s(1.0, 1.0, 1, 1.0, 1.5), std::invalid_argument);
    CHECK_THROWS_AS(compute_time_s(-1.0, 1.0, 1, 1.0, 1.0), std::invalid_argument);
}

TEST_CASE("compute energy is capacitance dynamic power plus static leakage") {
    // one cycle at 1 Hz: E = kappa * 1 * 1^2 + static * 1 s
    CHECK(compute_energy_j(1.0, 1.0, 1, 1.0, 1.0, 3.0, 0.0) == 3.0);
    CHECK(compute_energy_j(1.0, 1.0, 1, 1.0, 1.0, 3.0, 7.0) == 10.0);
    CHECK(compute_energy_j(0.0, 1.0, 1, 1.0, 1.0, 3.0, 7.0) == 0.0);

    const double e = compute_energy_j(1.0e12, 1.3e9, 2048, 2.0, 0.4, 2.0e-26, 5.0);
    CHECK(e == doctest::Approx(22.977388822115383).epsilon(1e-12));

    // with no static draw the dynamic term scales as f^2 at fixed cycles
    const double e1 = compute_energy_j(1.0e12, 1.0e9, 2048, 2.0, 0.4, 2.0e-26, 0.0);
    const double e2 = compute_energy_j(1.0e12, 2.0e9, 2048, 2.0, 0.4, 2.0e-26, 0.0);
    CHECK(e2 == 4.0 * e1);

    CHECK_THROWS_AS(compute_energy_j(1.0, 1.0, 1, 1.0, 1.0, 0.0, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(compute_energy_j(1.0, 1.0, 1, 1.0, 1.0, 1.0, -1.0), std::invalid_argument);
    CHECK_THROWS_AS(compute_energy_j(1.0, 0.0, 1, 1.0, 1.0, 1.0, 0.0), std::invalid_argument);
}

TEST_CASE("frequency ladder spans lo fraction to max in even steps") {
    const auto levels = make_freq_levels(2.52e9, 8, 0.4);
    REQUIRE(levels.size() == 8);
    CHECK(levels.front() == doctest::Approx(1.008e9).epsilon(1e-12));
    CHECK(levels.back() == 2.52e9);  // top level is exact by construction
    for (std::size_t i = 1; i < levels.size(); ++i) {
        CHECK(levels[i] > levels[i - 1]);
        CHECK(levels[i] - levels[i - 1] == doctest::Approx(2.16e8).epsilon(1e-12));
    }

    const auto single = make_freq_levels(1.0e9, 1, 0.4);
    REQUIRE(single.size() == 1);
    CHECK(single[0] == 1.0e9);

    CHECK_THROWS_AS(make_freq_levels(0.0, 8, 0.4), std::invalid_argument);
    CHECK_THROWS_AS(make_freq_levels(1.0e9, 0, 0.4), std::invalid_argument);
    CHECK_THROWS_AS(make_freq_levels(1.0e9, 8, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(make_freq_levels(1.0e9, 8, 1.5), std::invalid_argument);
}

TEST_CASE("transfer cost prices bits over the link and radios over the delay") {
    const auto [tx, rx] = comm_cost(1000000, 8.0e6, 0.5, 0.25, Phase::uplink_smashed);
    CHECK(tx.delay_s == 1.0);
    CHECK(rx.delay_s == 1.0);
    CHECK(tx.energy_j == 0.5);
    CHECK(rx.energy_j == 0.25);
    CHECK(tx.phase == Phase::uplink_smashed);

    // nothing to send costs nothing, even on a dead link
    const auto [z_tx, z_rx] = comm_cost(0, 0.0, 1.0, 1.0, Phase::uplink_params);
    CHECK(z_tx.delay_s == 0.0);
    CHECK(z_tx.energy_j == 0.0);
    CHECK(z_rx.energy_j == 0.0);

    CHECK_THROWS_AS(comm_cost(5, 0.0, 1.0, 1.0, Phase::downlink_gradients), LinkOutageError);
    CHECK_THROWS_AS(comm_cost(-1, 1.0e6, 1.0, 1.0, Phase::uplink_smashed), std::invalid_argument);

    try {
        comm_cost(5, 0.0, 1.0, 1.0, Phase::downlink_gradients);
        FAIL("expected LinkOutageError");
    } catch (const LinkOutageError& err) {
        CHECK(std::string(err.what()).find("downlink_gradients") != std::string::npos);
    }
}

TEST_CASE("round cost matches the hand-priced reference round") {
    const ModelProfile student = build_transformer_profile(2048, 12, 128, 32000, 2, "student");
    const ModelProfile teacher = build_transformer_profile(3072, 64, 128, 32000, 2, "teacher");
    const DeviceProfile device = orin_device();
    const ServerProfile server = edge_server();
    const CutPlan plan{1, 2.52e9};

    const WorkloadSplit split = split_workload(student, teacher, plan, 8, 2, 1.0);
    CHECK(split.device_flops == 312477745152.0);
    CHECK(split.server_flops == 18987513544704.0);
    CHECK(split.smashed_bytes_up == 10485760);
    CHECK(split.gradient_bytes_down == 4194304);
    CHECK(split.device_param_bytes_up == 231735296);

    const RoundMetrics m = round_cost(split, device, server, plan, 1.0e9, 2.0e9, 1, 10);
    CHECK(m.delay_s == doctest::Approx(10.076143049611723).epsilon(1e-12));
    CHECK(m.device_energy_j == doctest::Approx(71.79922648615384).epsilon(1e-12));
    CHECK(m.server_energy_j == doctest::Approx(3035.713787970316).epsilon(1e-12));
    CHECK(m.comm_energy_j == doctest::Approx(18.085838848).epsilon(1e-12));
    CHECK(m.device_radio_energy_j == doctest::Approx(5.637144576).epsilon(1e-12));
    CHECK(m.server_radio_energy_j == doctest::Approx(12.448694272).epsilon(1e-12));
    CHECK(m.total_energy_j == doctest::Approx(3125.5988533044697).epsilon(1e-12));
    CHECK(m.total_energy_j == m.device_energy_j + m.server_energy_j + m.comm_energy_j);
    CHECK(m.comm_energy_j == m.device_radio_energy_j + m.server_radio_energy_j);
    CHECK(m.plan.cut_index == 1);
    CHECK(m.plan.gpu_frequency_hz == 2.52e9);

    // per-phase breakdown reconstructs the round totals
    double phase_delay = 0.0;
    double phase_energy = 0.0;
    for (const PhaseCost& phase : m.phases) {
        phase_delay += phase.delay_s;
        phase_energy += phase.energy_j;
    }
    CHECK(phase_delay == doctest::Approx(m.delay_s).epsilon(1e-12));
    CHECK(phase_energy == doctest::Approx(m.total_energy_j).epsilon(1e-12));

    CHECK(m.phases[1].delay_s == doctest::Approx(0.8388608).epsilon(1e-12));
    CHECK(m.phases[3].delay_s == doctest::Approx(0.16777216).epsilon(1e-12));
    CHECK(m.phases[5].delay_s == doctest::Approx(1.853882368).epsilon(1e-12));
}

TEST_CASE("parameter upload is paid once per round, batch phases scale") {
    const ModelProfile student = build_transformer_profile(2048, 12, 128, 32000, 2, "student");
    const ModelProfile teacher = build_transformer_profile(3072, 64, 128, 32000, 2, "teacher");
    const CutPlan plan{1, 2.52e9};
    const WorkloadSplit split = split_workload(student, teacher, plan, 8, 2, 1.0);
    const DeviceProfile device = orin_device();
    const ServerProfile server = edge_server();

    const RoundMetrics ten = round_cost(split, device, server, plan, 1.0e9, 2.0e9, 1, 10);
    const RoundMetrics twenty = round_cost(split, device, server, plan, 1.0e9, 2.0e9, 2, 10);
    const double params_delay = ten.phases[5].delay_s;
    CHECK(twenty.phases[5].delay_s == params_delay);
    CHECK(twenty.delay_s == doctest::Approx(2.0 * ten.delay_s - params_delay).epsilon(1e-12));
    CHECK(twenty.device_energy_j == doctest::Approx(2.0 * ten.device_energy_j).epsilon(1e-12));
    CHECK(twenty.server_energy_j == doctest::Approx(2.0 * ten.server_energy_j).epsilon(1e-12));
}

TEST_CASE("server static draw can be excluded from the energy account") {
    const ModelProfile student = build_transformer_profile(2048, 12, 128, 32000, 2, "student");
    const ModelProfile teacher = build_transformer_profile(3072, 64, 128, 32000, 2, "teacher");
    const CutPlan plan{1, 2.52e9};
    const WorkloadSplit split = split_workload(student, teacher, plan, 8, 2, 1.0);
    const DeviceProfile device = orin_device();
    const ServerProfile server = edge_server();

    CostOptions opts;
    opts.include_server_static_energy = false;
    const RoundMetrics on = round_cost(split, device, server, plan, 1.0e9, 2.0e9, 1, 10);
    const RoundMetrics off = round_cost(split, device, server, plan, 1.0e9, 2.0e9, 1, 10, opts);

    const double t_server = compute_time_s(split.server_flops, plan.gpu_frequency_hz,
                                           server.cores, server.flops_per_cycle_per_core,
                                           server.compute_utilization);
    CHECK(on.server_energy_j - off.server_energy_j ==
          doctest::Approx(server.static_power_w * t_server * 10.0).epsilon(1e-9));
    CHECK(off.device_energy_j == on.device_energy_j);
    CHECK(off.comm_energy_j == on.comm_energy_j);
    CHECK(off.delay_s == on.delay_s);
}

TEST_CASE("round cost rejects frequencies off the DVFS ladder and dead links") {
    const ModelProfile student = build_transformer_profile(2048, 12, 128, 32000, 2, "student");
    const ModelProfile teacher = build_transformer_profile(3072, 64, 128, 32000, 2, "teacher");
    const CutPlan good_plan{1, 2.52e9};
    const WorkloadSplit split = split_workload(student, teacher, good_plan, 8, 2, 1.0);
    const DeviceProfile device = orin_device();
    const ServerProfile server = edge_server();

    const CutPlan off_ladder{1, 2.0e9};
    CHECK_THROWS_AS(round_cost(split, device, server, off_ladder, 1.0e9, 2.0e9, 1, 10),
                    std::invalid_argument);
    CHECK_THROWS_AS(round_cost(split, device, server, good_plan, 0.0, 2.0e9, 1, 10),
                    LinkOutageError);
    CHECK_THROWS_AS(round_cost(split, device, server, good_plan, 1.0e9, 0.0, 1, 10),
                    LinkOutageError);
    CHECK_THROWS_AS(round_cost(split, device, server, good_plan, 1.0e9, 2.0e9, 0, 10),
                    std::invalid_argument);
    CHECK_THROWS_AS(round_cost(split, device, server, good_plan, 1.0e9, 2.0e9, 1, 0),
                    std::invalid_argument);
}

TEST_CASE("profile validation rejects broken hardware descriptions") {
    DeviceProfile d = orin_device();
    d.compute_utilization = 0.0;
    CHECK_THROWS_AS(validate(d), std::invalid_argument);
    d = orin_device();
    d.effective_capacitance = 0.0;
    CHECK_THROWS_AS(validate(d), std::invalid_argument);

    ServerProfile s = edge_server();
    s.freq_levels_hz = {2.0e9, 1.0e9};
    CHECK_THROWS_AS(validate(s), std::invalid_argument);
    s = edge_server();
    s.freq_levels_hz.clear();
    CHECK_THROWS_AS(validate(s), std::invalid_argument);
    CHECK(edge_server().max_freq_hz() == 2.52e9);
}

TEST_CASE("phase names are stable identifiers") {
    CHECK(std::string(phase_name(Phase::device_forward)) == "device_forward");
    CHECK(std::string(phase_name(Phase::uplink_params)) == "uplink_params");
    CHECK(kPhaseCount == 6);
}

#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <string>

#include "splitkd/channel.hpp"

using namespace splitkd;

namespace {

ChannelModel test_model() {
    ChannelModel m;
    m.noise_density_dbm_per_hz = -166.0;
    m.bandwidth_hz = 1.0e8;
    m.device_tx_power_dbm = 23.0;
    m.server_tx_power_dbm = 30.0;
    m.pathloss_ref_db = 61.34;
    m.pathloss_exponent = 2.9;
    return m;
}

}  // namespace

TEST_CASE("default CQI table is the 15-entry NR ladder") {
    const auto& table = default_cqi_table();
    REQUIRE(table.size() == 15);
    CHECK(table.front().index == 1);
    CHECK(table.front().modulation == "QPSK");
    CHECK(table.front().spectral_efficiency == 0.1523);
    CHECK(table[6].modulation == "16QAM");
    CHECK(table[6].spectral_efficiency == 1.4766);
    CHECK(table.back().index == 15);
    CHECK(table.back().modulation == "64QAM");
    CHECK(table.back().spectral_efficiency == 5.5547);
    for (std::size_t i = 1; i < table.size(); ++i) {
        CHECK(table[i].spectral_efficiency > table[i - 1].spectral_efficiency);
        CHECK(table[i].index == table[i - 1].index + 1);
    }
}

TEST_CASE("shipped CQI data file matches the built-in table") {
    const auto loaded = load_cqi_table(std::string(SPLITKD_DATA_DIR) + "/cqi_table.csv");
    const auto& builtin = default_cqi_table();
    REQUIRE(loaded.size() == builtin.size());
    for (std::size_t i = 0; i < loaded.size(); ++i) {
        CHECK(loaded[i].index == builtin[i].index);
        CHECK(loaded[i].modulation == builtin[i].modulation);
        CHECK(loaded[i].spectral_efficiency == builtin[i].spectral_efficiency);
    }
}

TEST_CASE("log-distance path loss with near-field clamp") {
    const ChannelModel m = test_model();
    // 61.34 + 10 * 2.9 * log10(100)
    CHECK(path_loss_db(m, 100.0) == doctest::Approx(119.34).epsilon(1e-12));
    CHECK(path_loss_db(m, 1.0) == 61.34);
    // below the reference distance the model floors at the reference loss
    CHECK(path_loss_db(m, 0.25) == 61.34);
}

TEST_CASE("SNR composes tx power, path loss, and the noise floor") {
    const ChannelModel m = test_model();
    // 23 - (61.34 + 29) - (-166 + 80)
    CHECK(snr_db(m, 23.0, 10.0) == doctest::Approx(18.66).epsilon(1e-9));
}

TEST_CASE("CQI selection picks the largest efficiency under capacity") {
    const ChannelModel m = test_model();
    // capacity at 3 dB is log2(1 + 10^0.3) = 1.5826823549 -> 16QAM 1.4766
    CHECK(snr_to_cqi(m, 3.0) == 7);
    CHECK(snr_to_cqi(m, 60.0) == 15);
    CHECK(snr_to_cqi(m, -20.0) == 0);

    ChannelModel guarded = m;
    guarded.snr_margin_db = 3.0;
    // margin shifts 3 dB down to 0 dB: capacity 1.0 -> QPSK 0.877
    CHECK(snr_to_cqi(guarded, 3.0) == 5);
}

TEST_CASE("bitrate is spectral efficiency times bandwidth") {
    const ChannelModel m = test_model();
    CHECK(bitrate_bps(m, 15) == 555470000.0);
    CHECK(bitrate_bps(m, 1) == doctest::Approx(15230000.0).epsilon(1e-12));
    CHECK(bitrate_bps(m, 0) == 0.0);
    CHECK_THROWS_AS(bitrate_bps(m, 16), std::invalid_argument);
    CHECK_THROWS_AS(bitrate_bps(m, -1), std::invalid_argument);
}

TEST_CASE("drive-past trajectory geometry") {
    Trajectory traj;
    traj.start_distance_m = 200.0;
    traj.closest_approach_m = 20.0;
    traj.speed_mps = 30.0 / 3.6;
    traj.duration_s = 60.0;
    validate(traj);

    CHECK(distance_at(traj, 0.0) == doctest::Approx(200.0).epsilon(1e-12));
    CHECK(distance_at(traj, 12.0) == doctest::Approx(100.9975371765827).epsilon(1e-12));

    // minimum at the pass, receding afterwards
    const double t_pass = std::sqrt(200.0 * 200.0 - 20.0 * 20.0) / traj.speed_mps;
    CHECK(distance_at(traj, t_pass) == doctest::Approx(20.0).epsilon(1e-9));
    CHECK(distance_at(traj, t_pass + 5.0) > 20.0);

    CHECK_THROWS_AS(distance_at(traj, -0.5), std::invalid_argument);
    CHECK_THROWS_AS(distance_at(traj, 60.5), std::invalid_argument);
}

TEST_CASE("trajectory validation") {
    Trajectory bad;
    bad.start_distance_m = 10.0;
    bad.closest_approach_m = 20.0;  // closer than the start
    bad.duration_s = 10.0;
    CHECK_THROWS_AS(validate(bad), std::invalid_argument);

    bad.start_distance_m = 50.0;
    bad.speed_mps = -1.0;
    CHECK_THROWS_AS(validate(bad), std::invalid_argument);
}

TEST_CASE("shadowing draws are deterministic in (seed, index)") {
    CHECK(shadowing_db(0.0, 7, 3) == 0.0);
    const double a = shadowing_db(4.0, 99, 11);
    CHECK(shadowing_db(4.0, 99, 11) == a);
    CHECK(std::isfinite(a));
    // scale linearity of the underlying unit draw
    CHECK(shadowing_db(8.0, 99, 11) == doctest::Approx(2.0 * a).epsilon(1e-12));
}

TEST_CASE("link state evaluates both directions at one position") {
    const ChannelModel m = test_model();
    const LinkState near = link_state(m, 10.0);
    CHECK(near.distance_m == 10.0);
    // downlink has 7 dB more tx power, so its CQI can only be higher
    CHECK(near.snr_down_db > near.snr_up_db);
    CHECK(near.cqi_down >= near.cqi_up);
    CHECK(near.bitrate_up_bps == bitrate_bps(m, near.cqi_up));

    const LinkState far = link_state(m, 5.0e4);
    CHECK(far.cqi_up == 0);
    CHECK(far.bitrate_up_bps == 0.0);
}

TEST_CASE("channel validation rejects broken parameters") {
    ChannelModel m = test_model();
    m.bandwidth_hz = 0.0;
    CHECK_THROWS_AS(validate(m), std::invalid_argument);

    m = test_model();
    m.pathloss_exponent = 1.0;
    CHECK_THROWS_AS(validate(m), std::invalid_argument);

    m = test_model();
    m.cqi_table.resize(7);
    CHECK_THROWS_AS(validate(m), std::invalid_argument);
}

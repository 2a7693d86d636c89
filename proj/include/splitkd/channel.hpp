#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace splitkd {

/// One row of the NR CQI table: index, modulation label, spectral efficiency
/// in bits/s/Hz.
struct CqiEntry {
    int index = 0;
    std::string modulation;
    double spectral_efficiency = 0.0;
};

/// The 15-entry CQI table (TS 38.214 table 5.2.2.1-2, up to 64QAM). The same
/// table ships as data/cqi_table.csv; the two are checked against each other
/// in tests.
const std::vector<CqiEntry>& default_cqi_table();

/// Loads a CQI table from the versioned CSV data file.
std::vector<CqiEntry> load_cqi_table(const std::string& path);

/// Log-distance propagation plus link-adaptation parameters shared by uplink
/// and downlink; per-direction transmit powers.
struct ChannelModel {
    double noise_density_dbm_per_hz = -166.0;
    double bandwidth_hz = 4.0e8;
    double device_tx_power_dbm = 45.0;  // uplink EIRP
    double server_tx_power_dbm = 52.0;  // downlink EIRP
    double pathloss_ref_db = 61.34;     // loss at ref_distance_m
    double pathloss_exponent = 2.9;
    double ref_distance_m = 1.0;
    double snr_margin_db = 0.0;         // subtracted before CQI selection
    double shadowing_sigma_db = 0.0;    // 0 disables the seeded shadowing term
    std::vector<CqiEntry> cqi_table = default_cqi_table();
};

void validate(const ChannelModel& model);

/// Straight-line drive-past geometry: the along-road offset shrinks at
/// constant speed, passes the closest-approach point, and grows again.
struct Trajectory {
    double start_distance_m = 0.0;
    double closest_approach_m = 0.0;
    double speed_mps = 30.0 / 3.6;
    double duration_s = 0.0;
};

void validate(const Trajectory& traj);

double path_loss_db(const ChannelModel& model, double distance_m);

double snr_db(const ChannelModel& model, double tx_power_dbm, double distance_m);

/// Largest CQI whose spectral efficiency fits under the Shannon efficiency of
/// the (margin-adjusted) SNR; 0 when even CQI 1 is unsupported.
int snr_to_cqi(const ChannelModel& model, double snr_db);

/// cqi = 0 maps to 0 bps (outage); otherwise spectral efficiency times
/// bandwidth. Throws for cqi outside [0, 15].
double bitrate_bps(const ChannelModel& model, int cqi);

/// Distance to the access point at time t along the trajectory. Throws for
/// t outside [0, duration].
double distance_at(const Trajectory& traj, double t_s);

/// Deterministic log-normal shadowing draw, keyed by (seed, sample_index).
double shadowing_db(double sigma_db, std::uint64_t seed, std::uint64_t sample_index);

/// Channel snapshot for one round: both directions evaluated at the same
/// position with the same shadowing draw.
struct LinkState {
    double distance_m = 0.0;
    double snr_up_db = 0.0;
    double snr_down_db = 0.0;
    int cqi_up = 0;
    int cqi_down = 0;
    double bitrate_up_bps = 0.0;
    double bitrate_down_bps = 0.0;
};

LinkState link_state(const ChannelModel& model, double distance_m, double shadow_db = 0.0);

}  // namespace splitkd

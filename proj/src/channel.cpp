#include "splitkd/channel.hpp"

#include <cmath>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>

namespace splitkd {

namespace {

void require(bool ok, const std::string& what) {
    if (!ok) throw std::invalid_argument(what);
}

}  // namespace

const std::vector<CqiEntry>& default_cqi_table() {
    // TS 38.214 table 5.2.2.1-2.
    static const std::vector<CqiEntry> table = {
        {1, "QPSK", 0.1523},  {2, "QPSK", 0.2344},   {3, "QPSK", 0.3770},
        {4, "QPSK", 0.6016},  {5, "QPSK", 0.8770},   {6, "QPSK", 1.1758},
        {7, "16QAM", 1.4766}, {8, "16QAM", 1.9141},  {9, "16QAM", 2.4063},
        {10, "64QAM", 2.7305}, {11, "64QAM", 3.3223}, {12, "64QAM", 3.9023},
        {13, "64QAM", 4.5234}, {14, "64QAM", 5.1152}, {15, "64QAM", 5.5547},
    };
    return table;
}

std::vector<CqiEntry> load_cqi_table(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open CQI table: " + path);
    std::vector<CqiEntry> table;
    std::string line;
    bool header_seen = false;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        if (!header_seen) {  // column header row
            header_seen = true;
            continue;
        }
        std::istringstream row(line);
        std::string index_s, modulation, eff_s;
        if (!std::getline(row, index_s, ',') || !std::getline(row, modulation, ',') ||
            !std::getline(row, eff_s, ','))
            throw std::runtime_error("malformed CQI table row: " + line);
        CqiEntry entry;
        entry.index = std::stoi(index_s);
        entry.modulation = modulation;
        entry.spectral_efficiency = std::stod(eff_s);
        table.push_back(entry);
    }
    if (table.size() != 15) throw std::runtime_error("CQI table must have 15 rows: " + path);
    return table;
}

void validate(const ChannelModel& model) {
    require(model.bandwidth_hz > 0.0, "channel: bandwidth must be positive");
    require(model.pathloss_exponent >= 2.0, "channel: pathloss exponent must be >= 2");
    require(model.ref_distance_m > 0.0, "channel: reference distance must be positive");
    require(model.shadowing_sigma_db >= 0.0, "channel: shadowing sigma must be >= 0");
    require(model.cqi_table.size() == 15, "channel: CQI table must have 15 entries");
    for (std::size_t i = 0; i < model.cqi_table.size(); ++i) {
        require(model.cqi_table[i].index == static_cast<int>(i) + 1,
                "channel: CQI indices must be 1..15 in order");
        if (i > 0)
            require(model.cqi_table[i].spectral_efficiency >
                        model.cqi_table[i - 1].spectral_efficiency,
                    "channel: CQI spectral efficiency must be strictly increasing");
    }
}

void validate(const Trajectory& traj) {
    require(traj.speed_mps >= 0.0, "trajectory: speed must be >= 0");
    require(traj.start_distance_m > 0.0, "trajectory: start distance must be positive");
    require(traj.closest_approach_m > 0.0, "trajectory: closest approach must be positive");
    require(traj.start_distance_m >= traj.closest_approach_m,
            "trajectory: start distance must be >= closest approach");
    require(traj.duration_s >= 0.0, "trajectory: duration must be >= 0");
}

double path_loss_db(const ChannelModel& model, double distance_m) {
    if (distance_m <= 0.0) throw std::invalid_argument("path_loss_db: distance must be positive");
    if (distance_m < model.ref_distance_m) return model.pathloss_ref_db;
    return model.pathloss_ref_db +
           10.0 * model.pathloss_exponent * std::log10(distance_m / model.ref_distance_m);
}

double snr_db(const ChannelModel& model, double tx_power_dbm, double distance_m) {
    const double noise_floor_dbm =
        model.noise_density_dbm_per_hz + 10.0 * std::log10(model.bandwidth_hz);
    return tx_power_dbm - path_loss_db(model, distance_m) - noise_floor_dbm;
}

int snr_to_cqi(const ChannelModel& model, double snr_db) {
    const double snr_linear = std::pow(10.0, (snr_db - model.snr_margin_db) / 10.0);
    const double efficiency = std::log2(1.0 + snr_linear);
    int cqi = 0;
    for (const CqiEntry& entry : model.cqi_table) {
        if (entry.spectral_efficiency <= efficiency) cqi = entry.index;
    }
    return cqi;
}

double bitrate_bps(const ChannelModel& model, int cqi) {
    if (cqi < 0 || cqi > static_cast<int>(model.cqi_table.size()))
        throw std::invalid_argument("bitrate_bps: CQI out of range");
    if (cqi == 0) return 0.0;
    return model.cqi_table[static_cast<std::size_t>(cqi - 1)].spectral_efficiency *
           model.bandwidth_hz;
}

double distance_at(const Trajectory& traj, double t_s) {
    validate(traj);
    if (t_s < 0.0 || t_s > traj.duration_s)
        throw std::invalid_argument("distance_at: t outside [0, duration]");
    const double closest2 = traj.closest_approach_m * traj.closest_approach_m;
    const double offset0 =
        std::sqrt(traj.start_distance_m * traj.start_distance_m - closest2);
    const double offset = offset0 - traj.speed_mps * t_s;
    return std::sqrt(closest2 + offset * offset);
}

double shadowing_db(double sigma_db, std::uint64_t seed, std::uint64_t sample_index) {
    if (sigma_db <= 0.0) return 0.0;
    std::seed_seq seq{static_cast<unsigned>(seed), static_cast<unsigned>(seed >> 32),
                      static_cast<unsigned>(sample_index),
                      static_cast<unsigned>(sample_index >> 32)};
    std::mt19937_64 rng(seq);
    std::normal_distribution<double> normal(0.0, sigma_db);
    return normal(rng);
}

LinkState link_state(const ChannelModel& model, double distance_m, double shadow_db) {
    LinkState state;
    state.distance_m = distance_m;
    state.snr_up_db = snr_db(model, model.device_tx_power_dbm, distance_m) - shadow_db;
    state.snr_down_db = snr_db(model, model.server_tx_power_dbm, distance_m) - shadow_db;
    state.cqi_up = snr_to_cqi(model, state.snr_up_db);
    state.cqi_down = snr_to_cqi(model, state.snr_down_db);
    state.bitrate_up_bps = bitrate_bps(model, state.cqi_up);
    state.bitrate_down_bps = bitrate_bps(model, state.cqi_down);
    return state;
}

}  // namespace splitkd

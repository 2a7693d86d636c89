#include "splitkd/cost_model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace splitkd {

namespace {

void require(bool ok, const std::string& message) {
    if (!ok) throw std::invalid_argument(message);
}

void check_compute_params(const std::string& who, double freq_hz, int cores,
                          double fpc, double util) {
    require(freq_hz > 0.0, who + ": frequency must be positive");
    require(cores > 0, who + ": cores must be positive");
    require(fpc > 0.0, who + ": flops_per_cycle_per_core must be positive");
    require(util > 0.0 && util <= 1.0, who + ": compute_utilization must be in (0, 1]");
}

}  // namespace

void validate(const DeviceProfile& device) {
    check_compute_params("device '" + device.name + "'", device.max_gpu_freq_hz,
                         device.cores, device.flops_per_cycle_per_core,
                         device.compute_utilization);
    require(device.effective_capacitance > 0.0,
            "device '" + device.name + "': effective_capacitance must be positive");
    require(device.static_power_w >= 0.0,
            "device '" + device.name + "': static_power_w must be nonnegative");
    require(device.tx_power_w > 0.0 && device.rx_power_w > 0.0,
            "device '" + device.name + "': radio powers must be positive");
}

void validate(const ServerProfile& server) {
    require(!server.freq_levels_hz.empty(),
            "server '" + server.name + "': freq_levels_hz must be non-empty");
    for (std::size_t i = 0; i < server.freq_levels_hz.size(); ++i) {
        require(server.freq_levels_hz[i] > 0.0,
                "server '" + server.name + "': frequency levels must be positive");
        if (i > 0) {
            require(server.freq_levels_hz[i] > server.freq_levels_hz[i - 1],
                    "server '" + server.name + "': freq_levels_hz must be strictly increasing");
        }
    }
    check_compute_params("server '" + server.name + "'", server.freq_levels_hz.front(),
                         server.cores, server.flops_per_cycle_per_core,
                         server.compute_utilization);
    require(server.effective_capacitance > 0.0,
            "server '" + server.name + "': effective_capacitance must be positive");
    require(server.static_power_w >= 0.0,
            "server '" + server.name + "': static_power_w must be nonnegative");
    require(server.tx_power_w > 0.0 && server.rx_power_w > 0.0,
            "server '" + server.name + "': radio powers must be positive");
}

std::vector<double> make_freq_levels(double max_freq_hz, int count, double lo_fraction) {
    require(max_freq_hz > 0.0, "make_freq_levels: max frequency must be positive");
    require(count >= 1, "make_freq_levels: count must be at least 1");
    require(lo_fraction > 0.0 && lo_fraction <= 1.0,
            "make_freq_levels: lo_fraction must be in (0, 1]");
    std::vector<double> levels(static_cast<std::size_t>(count));
    if (count == 1) {
        levels[0] = max_freq_hz;
        return levels;
    }
    const double lo = lo_fraction * max_freq_hz;
    const double step = (max_freq_hz - lo) / (count - 1);
    for (int i = 0; i < count; ++i) levels[static_cast<std::size_t>(i)] = lo + step * i;
    levels.back() = max_freq_hz;  // exact top level regardless of rounding
    return levels;
}

const char* phase_name(Phase phase) {
    switch (phase) {
        case Phase::device_forward: return "device_forward";
        case Phase::uplink_smashed: return "uplink_smashed";
        case Phase::server_forward_backward: return "server_forward_backward";
        case Phase::downlink_gradients: return "downlink_gradients";
        case Phase::device_backward: return "device_backward";
        case Phase::uplink_params: return "uplink_params";
    }
    throw std::invalid_argument("phase_name: unknown phase");
}

double compute_time_s(double flops, double freq_hz, int cores,
                      double flops_per_cycle_per_core, double utilization) {
    require(flops >= 0.0, "compute_time_s: flops must be nonnegative");
    check_compute_params("compute_time_s", freq_hz, cores, flops_per_cycle_per_core,
                         utilization);
    const double rate = freq_hz * cores * flops_per_cycle_per_core * utilization;
    return flops / rate;
}

double compute_energy_j(double flops, double freq_hz, int cores,
                        double flops_per_cycle_per_core, double utilization,
                        double effective_capacitance, double static_power_w) {
    require(effective_capacitance > 0.0,
            "compute_energy_j: effective_capacitance must be positive");
    require(static_power_w >= 0.0, "compute_energy_j: static_power_w must be nonnegative");
    const double t = compute_time_s(flops, freq_hz, cores, flops_per_cycle_per_core,
                                    utilization);
    const double cycles = flops / (cores * flops_per_cycle_per_core * utilization);
    return effective_capacitance * cycles * freq_hz * freq_hz + static_power_w * t;
}

std::pair<PhaseCost, PhaseCost> comm_cost(std::int64_t bytes, double bitrate_bps,
                                          double tx_power_w, double rx_power_w,
                                          Phase phase) {
    require(bytes >= 0, "comm_cost: bytes must be nonnegative");
    require(tx_power_w > 0.0 && rx_power_w > 0.0, "comm_cost: radio powers must be positive");
    PhaseCost sender{phase, 0.0, 0.0};
    PhaseCost receiver{phase, 0.0, 0.0};
    if (bytes == 0) return {sender, receiver};
    if (bitrate_bps <= 0.0) {
        std::ostringstream oss;
        oss << "link outage during " << phase_name(phase) << ": " << bytes
            << " bytes pending with zero bitrate";
        throw LinkOutageError(oss.str());
    }
    const double delay = 8.0 * static_cast<double>(bytes) / bitrate_bps;
    sender.delay_s = delay;
    sender.energy_j = tx_power_w * delay;
    receiver.delay_s = delay;
    receiver.energy_j = rx_power_w * delay;
    return {sender, receiver};
}

RoundMetrics round_cost(const WorkloadSplit& split, const DeviceProfile& device,
                        const ServerProfile& server, const CutPlan& plan,
                        double bitrate_up_bps, double bitrate_down_bps,
                        int local_epochs, int batches_per_epoch,
                        const CostOptions& options) {
    validate(device);
    validate(server);
    require(local_epochs >= 1, "round_cost: local_epochs must be at least 1");
    require(batches_per_epoch >= 1, "round_cost: batches_per_epoch must be at least 1");
    const auto& levels = server.freq_levels_hz;
    require(std::find(levels.begin(), levels.end(), plan.gpu_frequency_hz) != levels.end(),
            "round_cost: plan frequency is not one of the server DVFS levels");

    const int batches = local_epochs * batches_per_epoch;

    // Per-batch phase costs. Device compute at max frequency; server at the
    // planned frequency.
    PhaseCost dev_fwd{Phase::device_forward, 0.0, 0.0};
    dev_fwd.delay_s = compute_time_s(split.device_flops_forward, device.max_gpu_freq_hz,
                                     device.cores, device.flops_per_cycle_per_core,
                                     device.compute_utilization);
    dev_fwd.energy_j = compute_energy_j(split.device_flops_forward, device.max_gpu_freq_hz,
                                        device.cores, device.flops_per_cycle_per_core,
                                        device.compute_utilization,
                                        device.effective_capacitance, device.static_power_w);

    PhaseCost dev_bwd{Phase::device_backward, 0.0, 0.0};
    dev_bwd.delay_s = compute_time_s(split.device_flops_backward, device.max_gpu_freq_hz,
                                     device.cores, device.flops_per_cycle_per_core,
                                     device.compute_utilization);
    dev_bwd.energy_j = compute_energy_j(split.device_flops_backward, device.max_gpu_freq_hz,
                                        device.cores, device.flops_per_cycle_per_core,
                                        device.compute_utilization,
                                        device.effective_capacitance, device.static_power_w);

    PhaseCost srv{Phase::server_forward_backward, 0.0, 0.0};
    srv.delay_s = compute_time_s(split.server_flops, plan.gpu_frequency_hz, server.cores,
                                 server.flops_per_cycle_per_core, server.compute_utilization);
    const double srv_static = options.include_server_static_energy ? server.static_power_w : 0.0;
    srv.energy_j = compute_energy_j(split.server_flops, plan.gpu_frequency_hz, server.cores,
                                    server.flops_per_cycle_per_core,
                                    server.compute_utilization, server.effective_capacitance,
                                    srv_static);

    auto [up_tx, up_rx] = comm_cost(split.smashed_bytes_up, bitrate_up_bps,
                                    device.tx_power_w, server.rx_power_w,
                                    Phase::uplink_smashed);
    auto [down_tx, down_rx] = comm_cost(split.gradient_bytes_down, bitrate_down_bps,
                                        server.tx_power_w, device.rx_power_w,
                                        Phase::downlink_gradients);
    auto [par_tx, par_rx] = comm_cost(split.device_param_bytes_up, bitrate_up_bps,
                                      device.tx_power_w, server.rx_power_w,
                                      Phase::uplink_params);

    RoundMetrics m;
    m.plan = plan;

    const double batch_delay = dev_fwd.delay_s + up_tx.delay_s + srv.delay_s +
                               down_tx.delay_s + dev_bwd.delay_s;
    m.delay_s = batch_delay * batches + par_tx.delay_s;

    m.device_energy_j = (dev_fwd.energy_j + dev_bwd.energy_j) * batches;
    m.server_energy_j = srv.energy_j * batches;
    m.device_radio_energy_j = (up_tx.energy_j + down_rx.energy_j) * batches + par_tx.energy_j;
    m.server_radio_energy_j = (up_rx.energy_j + down_tx.energy_j) * batches + par_rx.energy_j;
    m.comm_energy_j = m.device_radio_energy_j + m.server_radio_energy_j;
    m.total_energy_j = m.device_energy_j + m.server_energy_j + m.comm_energy_j;

    auto scale = [batches](const PhaseCost& per_batch, double extra_energy) {
        PhaseCost total = per_batch;
        total.delay_s *= batches;
        total.energy_j = per_batch.energy_j * batches + extra_energy;
        return total;
    };
    m.phases[0] = scale(dev_fwd, 0.0);
    m.phases[1] = {Phase::uplink_smashed, up_tx.delay_s * batches,
                   (up_tx.energy_j + up_rx.energy_j) * batches};
    m.phases[2] = scale(srv, 0.0);
    m.phases[3] = {Phase::downlink_gradients, down_tx.delay_s * batches,
                   (down_tx.energy_j + down_rx.energy_j) * batches};
    m.phases[4] = scale(dev_bwd, 0.0);
    m.phases[5] = {Phase::uplink_params, par_tx.delay_s, par_tx.energy_j + par_rx.energy_j};
    return m;
}

}  // namespace splitkd

#include "splitkd/scenario_io.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <sstream>
#include <stdexcept>

namespace splitkd {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& message) { throw std::invalid_argument(message); }

void check_keys(const json& obj, const std::string& where,
                std::initializer_list<const char*> allowed) {
    if (!obj.is_object()) fail(where + ": expected an object");
    for (const auto& item : obj.items()) {
        bool known = false;
        for (const char* key : allowed) {
            if (item.key() == key) {
                known = true;
                break;
            }
        }
        if (!known) fail("unknown key '" + item.key() + "' in " + where);
    }
}

const json& field(const json& obj, const std::string& where, const char* key) {
    if (!obj.contains(key)) fail("missing required key '" + std::string(key) + "' in " + where);
    return obj.at(key);
}

double get_num(const json& obj, const std::string& where, const char* key) {
    const json& v = field(obj, where, key);
    if (!v.is_number()) fail(where + "." + key + ": expected a number");
    return v.get<double>();
}

double get_num_or(const json& obj, const std::string& where, const char* key, double def) {
    return obj.contains(key) ? get_num(obj, where, key) : def;
}

int get_int(const json& obj, const std::string& where, const char* key) {
    const json& v = field(obj, where, key);
    if (!v.is_number_integer()) fail(where + "." + key + ": expected an integer");
    return v.get<int>();
}

int get_int_or(const json& obj, const std::string& where, const char* key, int def) {
    return obj.contains(key) ? get_int(obj, where, key) : def;
}

std::int64_t get_i64(const json& obj, const std::string& where, const char* key) {
    const json& v = field(obj, where, key);
    if (!v.is_number_integer()) fail(where + "." + key + ": expected an integer");
    return v.get<std::int64_t>();
}

std::uint64_t get_u64(const json& obj, const std::string& where, const char* key) {
    const json& v = field(obj, where, key);
    if (!(v.is_number_unsigned() || (v.is_number_integer() && v.get<std::int64_t>() >= 0))) {
        fail(where + "." + key + ": expected a nonnegative integer");
    }
    return v.get<std::uint64_t>();
}

std::string get_str(const json& obj, const std::string& where, const char* key) {
    const json& v = field(obj, where, key);
    if (!v.is_string()) fail(where + "." + key + ": expected a string");
    return v.get<std::string>();
}

bool get_bool_or(const json& obj, const std::string& where, const char* key, bool def) {
    if (!obj.contains(key)) return def;
    const json& v = obj.at(key);
    if (!v.is_boolean()) fail(where + "." + key + ": expected a boolean");
    return v.get<bool>();
}

LayerProfile parse_layer(const json& obj, const std::string& where) {
    check_keys(obj, where,
               {"flops_forward", "flops_backward", "param_bytes",
                "activation_bytes_per_sample"});
    LayerProfile layer;
    layer.flops_forward = get_num(obj, where, "flops_forward");
    layer.flops_backward =
        get_num_or(obj, where, "flops_backward", 2.0 * layer.flops_forward);
    layer.param_bytes = get_i64(obj, where, "param_bytes");
    layer.activation_bytes_per_sample = get_i64(obj, where, "activation_bytes_per_sample");
    return layer;
}

ModelProfile parse_model(const json& obj, const std::string& where) {
    check_keys(obj, where, {"name", "precision_bytes", "transformer", "layers"});
    const std::string name = get_str(obj, where, "name");
    const int precision = get_int_or(obj, where, "precision_bytes", 2);
    const bool has_transformer = obj.contains("transformer");
    const bool has_layers = obj.contains("layers");
    if (has_transformer == has_layers) {
        fail(where + ": exactly one of 'transformer' or 'layers' required");
    }
    if (has_transformer) {
        const json& t = obj.at("transformer");
        const std::string tw = where + ".transformer";
        check_keys(t, tw, {"hidden_dim", "num_blocks", "seq_len", "vocab_size"});
        return build_transformer_profile(get_int(t, tw, "hidden_dim"),
                                         get_int(t, tw, "num_blocks"),
                                         get_int(t, tw, "seq_len"),
                                         get_i64(t, tw, "vocab_size"), precision, name);
    }
    const json& l = obj.at("layers");
    const std::string lw = where + ".layers";
    check_keys(l, lw, {"embedding", "blocks", "head"});
    ModelProfile profile;
    profile.name = name;
    profile.precision_bytes = precision;
    profile.embedding = parse_layer(field(l, lw, "embedding"), lw + ".embedding");
    const json& blocks = field(l, lw, "blocks");
    if (!blocks.is_array()) fail(lw + ".blocks: expected an array");
    for (std::size_t i = 0; i < blocks.size(); ++i) {
        profile.blocks.push_back(
            parse_layer(blocks[i], lw + ".blocks[" + std::to_string(i) + "]"));
    }
    profile.head = parse_layer(field(l, lw, "head"), lw + ".head");
    validate(profile);
    return profile;
}

ServerProfile parse_server(const json& obj, const std::string& where) {
    check_keys(obj, where,
               {"name", "freq_levels_hz", "max_gpu_freq_hz", "freq_level_count",
                "freq_lo_fraction", "cores", "flops_per_cycle_per_core",
                "compute_utilization", "effective_capacitance", "static_power_w",
                "tx_power_w", "rx_power_w"});
    ServerProfile server;
    server.name = get_str(obj, where, "name");
    server.cores = get_int(obj, where, "cores");
    server.flops_per_cycle_per_core = get_num_or(obj, where, "flops_per_cycle_per_core", 2.0);
    server.compute_utilization = get_num_or(obj, where, "compute_utilization", 0.4);
    server.effective_capacitance = get_num(obj, where, "effective_capacitance");
    server.static_power_w = get_num(obj, where, "static_power_w");
    server.tx_power_w = get_num(obj, where, "tx_power_w");
    server.rx_power_w = get_num(obj, where, "rx_power_w");

    const bool has_list = obj.contains("freq_levels_hz");
    const bool has_max = obj.contains("max_gpu_freq_hz");
    if (has_list == has_max) {
        fail(where + ": exactly one of 'freq_levels_hz' or 'max_gpu_freq_hz' required");
    }
    if (has_list) {
        const json& levels = obj.at("freq_levels_hz");
        if (!levels.is_array() || levels.empty()) {
            fail(where + ".freq_levels_hz: expected a non-empty array");
        }
        for (const json& v : levels) {
            if (!v.is_number()) fail(where + ".freq_levels_hz: expected numbers");
            server.freq_levels_hz.push_back(v.get<double>());
        }
        if (obj.contains("freq_level_count") || obj.contains("freq_lo_fraction")) {
            fail(where + ": freq_level_count/freq_lo_fraction require max_gpu_freq_hz form");
        }
    } else {
        server.freq_levels_hz =
            make_freq_levels(get_num(obj, where, "max_gpu_freq_hz"),
                             get_int_or(obj, where, "freq_level_count", 8),
                             get_num_or(obj, where, "freq_lo_fraction", 0.4));
    }
    validate(server);
    return server;
}

Trajectory parse_trajectory(const json& obj, const std::string& where) {
    check_keys(obj, where,
               {"start_distance_m", "closest_approach_m", "speed_mps", "duration_s"});
    Trajectory trajectory;
    trajectory.start_distance_m = get_num(obj, where, "start_distance_m");
    trajectory.closest_approach_m = get_num(obj, where, "closest_approach_m");
    trajectory.speed_mps = get_num_or(obj, where, "speed_mps", trajectory.speed_mps);
    trajectory.duration_s = get_num(obj, where, "duration_s");
    validate(trajectory);
    return trajectory;
}

DeviceNode parse_device(const json& obj, const std::string& where) {
    check_keys(obj, where,
               {"name", "max_gpu_freq_hz", "cores", "flops_per_cycle_per_core",
                "compute_utilization", "effective_capacitance", "static_power_w",
                "tx_power_w", "rx_power_w", "trajectory"});
    DeviceNode node;
    node.profile.name = get_str(obj, where, "name");
    node.profile.max_gpu_freq_hz = get_num(obj, where, "max_gpu_freq_hz");
    node.profile.cores = get_int(obj, where, "cores");
    node.profile.flops_per_cycle_per_core =
        get_num_or(obj, where, "flops_per_cycle_per_core", 2.0);
    node.profile.compute_utilization = get_num_or(obj, where, "compute_utilization", 0.4);
    node.profile.effective_capacitance = get_num(obj, where, "effective_capacitance");
    node.profile.static_power_w = get_num(obj, where, "static_power_w");
    node.profile.tx_power_w = get_num(obj, where, "tx_power_w");
    node.profile.rx_power_w = get_num(obj, where, "rx_power_w");
    validate(node.profile);
    node.trajectory = parse_trajectory(field(obj, where, "trajectory"), where + ".trajectory");
    return node;
}

std::vector<CqiEntry> parse_cqi_table(const json& arr, const std::string& where) {
    if (!arr.is_array()) fail(where + ": expected an array");
    std::vector<CqiEntry> table;
    for (std::size_t i = 0; i < arr.size(); ++i) {
        const std::string ew = where + "[" + std::to_string(i) + "]";
        check_keys(arr[i], ew, {"index", "modulation", "spectral_efficiency"});
        CqiEntry entry;
        entry.index = get_int(arr[i], ew, "index");
        entry.modulation = get_str(arr[i], ew, "modulation");
        entry.spectral_efficiency = get_num(arr[i], ew, "spectral_efficiency");
        table.push_back(entry);
    }
    return table;
}

ChannelModel parse_channel(const json& obj, const std::string& where,
                           const std::string& base_dir) {
    check_keys(obj, where,
               {"bandwidth_hz", "device_tx_power_dbm", "server_tx_power_dbm",
                "pathloss_ref_db", "pathloss_exponent", "ref_distance_m", "snr_margin_db",
                "shadowing_sigma_db", "cqi_table", "cqi_table_path"});
    ChannelModel channel;
    channel.bandwidth_hz = get_num(obj, where, "bandwidth_hz");
    channel.device_tx_power_dbm = get_num(obj, where, "device_tx_power_dbm");
    channel.server_tx_power_dbm = get_num(obj, where, "server_tx_power_dbm");
    channel.pathloss_ref_db = get_num(obj, where, "pathloss_ref_db");
    channel.pathloss_exponent = get_num(obj, where, "pathloss_exponent");
    channel.ref_distance_m = get_num_or(obj, where, "ref_distance_m", 1.0);
    channel.snr_margin_db = get_num_or(obj, where, "snr_margin_db", 0.0);
    channel.shadowing_sigma_db = get_num_or(obj, where, "shadowing_sigma_db", 0.0);

    if (obj.contains("cqi_table") && obj.contains("cqi_table_path")) {
        fail(where + ": at most one of 'cqi_table' or 'cqi_table_path'");
    }
    if (obj.contains("cqi_table")) {
        channel.cqi_table = parse_cqi_table(obj.at("cqi_table"), where + ".cqi_table");
    } else if (obj.contains("cqi_table_path")) {
        const std::filesystem::path p(get_str(obj, where, "cqi_table_path"));
        channel.cqi_table =
            load_cqi_table(p.is_absolute() ? p.string()
                                           : (std::filesystem::path(base_dir) / p).string());
    } else {
        channel.cqi_table = default_cqi_table();
    }
    validate(channel);
    return channel;
}

SchedulingPolicy parse_policy(const std::string& name, const std::string& where) {
    if (name == "round_robin") return SchedulingPolicy::round_robin;
    if (name == "best_channel_first") return SchedulingPolicy::best_channel_first;
    fail(where + ": unknown policy '" + name +
         "' (expected round_robin|best_channel_first)");
}

TrainingConfig parse_training(const json& obj, const std::string& where) {
    check_keys(obj, where,
               {"rounds_per_device", "local_epochs", "batches_per_epoch", "batch_size",
                "wire_precision_bytes", "activation_compression_ratio", "delay_budget_s",
                "policy", "include_server_static_energy", "outage_retry_s"});
    TrainingConfig t;
    t.rounds_per_device = get_int(obj, where, "rounds_per_device");
    t.local_epochs = get_int_or(obj, where, "local_epochs", 1);
    t.batches_per_epoch = get_int(obj, where, "batches_per_epoch");
    t.batch_size = get_int(obj, where, "batch_size");
    t.wire_precision_bytes = get_int_or(obj, where, "wire_precision_bytes", 2);
    t.activation_compression_ratio =
        get_num_or(obj, where, "activation_compression_ratio", 1.0);
    t.delay_budget_s = get_num(obj, where, "delay_budget_s");
    t.policy = obj.contains("policy")
                   ? parse_policy(get_str(obj, where, "policy"), where + ".policy")
                   : SchedulingPolicy::round_robin;
    t.include_server_static_energy =
        get_bool_or(obj, where, "include_server_static_energy", true);
    t.outage_retry_s = get_num_or(obj, where, "outage_retry_s", 1.0);
    return t;
}

std::string num9(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return buf;
}

json layer_to_json(const LayerProfile& layer) {
    return json{{"flops_forward", layer.flops_forward},
                {"flops_backward", layer.flops_backward},
                {"param_bytes", layer.param_bytes},
                {"activation_bytes_per_sample", layer.activation_bytes_per_sample}};
}

json model_to_json(const ModelProfile& model) {
    json blocks = json::array();
    for (const LayerProfile& b : model.blocks) blocks.push_back(layer_to_json(b));
    return json{{"name", model.name},
                {"precision_bytes", model.precision_bytes},
                {"layers", json{{"embedding", layer_to_json(model.embedding)},
                                {"blocks", std::move(blocks)},
                                {"head", layer_to_json(model.head)}}}};
}

const char* policy_name(SchedulingPolicy policy) {
    return policy == SchedulingPolicy::round_robin ? "round_robin" : "best_channel_first";
}

}  // namespace

Scenario scenario_from_json(const json& doc, const std::string& base_dir) {
    const std::string where = "scenario";
    check_keys(doc, where,
               {"schema_version", "name", "seed", "student_model", "teacher_model",
                "server", "devices", "channel", "regimes", "training"});
    Scenario scenario;
    scenario.schema_version = get_int(doc, where, "schema_version");
    if (scenario.schema_version != 1) fail("scenario.schema_version: expected 1");
    scenario.name = get_str(doc, where, "name");
    scenario.seed = get_u64(doc, where, "seed");
    scenario.student = parse_model(field(doc, where, "student_model"), "scenario.student_model");
    scenario.teacher = parse_model(field(doc, where, "teacher_model"), "scenario.teacher_model");
    scenario.server = parse_server(field(doc, where, "server"), "scenario.server");

    const json& devices = field(doc, where, "devices");
    if (!devices.is_array() || devices.empty()) {
        fail("scenario.devices: expected a non-empty array");
    }
    for (std::size_t i = 0; i < devices.size(); ++i) {
        scenario.devices.push_back(
            parse_device(devices[i], "scenario.devices[" + std::to_string(i) + "]"));
    }

    scenario.channel = parse_channel(field(doc, where, "channel"), "scenario.channel", base_dir);

    const json& regimes = field(doc, where, "regimes");
    check_keys(regimes, "scenario.regimes", {"good", "normal", "poor"});
    for (const std::string& name : regime_names()) {
        scenario.regimes[name] = get_num(regimes, "scenario.regimes", name.c_str());
    }

    scenario.training = parse_training(field(doc, where, "training"), "scenario.training");
    validate(scenario);
    return scenario;
}

Scenario load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open scenario file: " + path);
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw std::runtime_error("scenario parse error in " + path + ": " + e.what());
    }
    return scenario_from_json(doc, std::filesystem::path(path).parent_path().string());
}

json scenario_to_json(const Scenario& scenario) {
    json doc;
    doc["schema_version"] = scenario.schema_version;
    doc["name"] = scenario.name;
    doc["seed"] = scenario.seed;
    doc["student_model"] = model_to_json(scenario.student);
    doc["teacher_model"] = model_to_json(scenario.teacher);

    json server;
    server["name"] = scenario.server.name;
    server["freq_levels_hz"] = scenario.server.freq_levels_hz;
    server["cores"] = scenario.server.cores;
    server["flops_per_cycle_per_core"] = scenario.server.flops_per_cycle_per_core;
    server["compute_utilization"] = scenario.server.compute_utilization;
    server["effective_capacitance"] = scenario.server.effective_capacitance;
    server["static_power_w"] = scenario.server.static_power_w;
    server["tx_power_w"] = scenario.server.tx_power_w;
    server["rx_power_w"] = scenario.server.rx_power_w;
    doc["server"] = std::move(server);

    json devices = json::array();
    for (const DeviceNode& node : scenario.devices) {
        json d;
        d["name"] = node.profile.name;
        d["max_gpu_freq_hz"] = node.profile.max_gpu_freq_hz;
        d["cores"] = node.profile.cores;
        d["flops_per_cycle_per_core"] = node.profile.flops_per_cycle_per_core;
        d["compute_utilization"] = node.profile.compute_utilization;
        d["effective_capacitance"] = node.profile.effective_capacitance;
        d["static_power_w"] = node.profile.static_power_w;
        d["tx_power_w"] = node.profile.tx_power_w;
        d["rx_power_w"] = node.profile.rx_power_w;
        d["trajectory"] = json{{"start_distance_m", node.trajectory.start_distance_m},
                               {"closest_approach_m", node.trajectory.closest_approach_m},
                               {"speed_mps", node.trajectory.speed_mps},
                               {"duration_s", node.trajectory.duration_s}};
        devices.push_back(std::move(d));
    }
    doc["devices"] = std::move(devices);

    json channel;
    channel["bandwidth_hz"] = scenario.channel.bandwidth_hz;
    channel["device_tx_power_dbm"] = scenario.channel.device_tx_power_dbm;
    channel["server_tx_power_dbm"] = scenario.channel.server_tx_power_dbm;
    channel["pathloss_ref_db"] = scenario.channel.pathloss_ref_db;
    channel["pathloss_exponent"] = scenario.channel.pathloss_exponent;
    channel["ref_distance_m"] = scenario.channel.ref_distance_m;
    channel["snr_margin_db"] = scenario.channel.snr_margin_db;
    channel["shadowing_sigma_db"] = scenario.channel.shadowing_sigma_db;
    json cqi = json::array();
    for (const CqiEntry& entry : scenario.channel.cqi_table) {
        cqi.push_back(json{{"index", entry.index},
                           {"modulation", entry.modulation},
                           {"spectral_efficiency", entry.spectral_efficiency}});
    }
    channel["cqi_table"] = std::move(cqi);
    doc["channel"] = std::move(channel);

    json regimes;
    for (const auto& [name, noise] : scenario.regimes) regimes[name] = noise;
    doc["regimes"] = std::move(regimes);

    json training;
    training["rounds_per_device"] = scenario.training.rounds_per_device;
    training["local_epochs"] = scenario.training.local_epochs;
    training["batches_per_epoch"] = scenario.training.batches_per_epoch;
    training["batch_size"] = scenario.training.batch_size;
    training["wire_precision_bytes"] = scenario.training.wire_precision_bytes;
    training["activation_compression_ratio"] =
        scenario.training.activation_compression_ratio;
    training["delay_budget_s"] = scenario.training.delay_budget_s;
    training["policy"] = policy_name(scenario.training.policy);
    training["include_server_static_energy"] =
        scenario.training.include_server_static_energy;
    training["outage_retry_s"] = scenario.training.outage_retry_s;
    doc["training"] = std::move(training);
    return doc;
}

std::string serialize_scenario(const Scenario& scenario) {
    return scenario_to_json(scenario).dump(2) + "\n";
}

std::vector<CatalogEntry> load_catalog(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open catalog file: " + path);
    std::vector<CatalogEntry> entries;
    std::string line;
    bool header_seen = false;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        if (!header_seen) {
            header_seen = true;
            continue;
        }
        std::istringstream row(line);
        CatalogEntry entry;
        std::string teacher_size, student_size, rate;
        if (!std::getline(row, entry.teacher, ',') || !std::getline(row, teacher_size, ',') ||
            !std::getline(row, entry.distillation_type, ',') ||
            !std::getline(row, entry.student, ',') || !std::getline(row, student_size, ',') ||
            !std::getline(row, rate, ',') || !std::getline(row, entry.performance_note)) {
            throw std::runtime_error("malformed catalog row: " + line);
        }
        entry.teacher_size_gb = std::stod(teacher_size);
        entry.student_size_gb = std::stod(student_size);
        entry.compression_rate = std::stod(rate);
        if (entry.student_size_gb <= 0.0 || entry.compression_rate <= 0.0) {
            throw std::runtime_error("corrupt catalog row (nonpositive sizes): " + line);
        }
        // stated rates are rounded to integers; 5% covers every row's rounding
        const double actual = entry.teacher_size_gb / entry.student_size_gb;
        if (std::abs(actual - entry.compression_rate) / entry.compression_rate > 0.05) {
            throw std::runtime_error("corrupt catalog row (size/rate mismatch): " + line);
        }
        entries.push_back(std::move(entry));
    }
    if (entries.empty()) throw std::runtime_error("catalog file has no entries: " + path);
    return entries;
}

std::string format_catalog(const std::vector<CatalogEntry>& entries) {
    std::ostringstream oss;
    oss << "teacher | size_gb | type | student | size_gb | rate | performance\n";
    for (const CatalogEntry& e : entries) {
        oss << e.teacher << " | " << num9(e.teacher_size_gb) << " | " << e.distillation_type
            << " | " << e.student << " | " << num9(e.student_size_gb) << " | "
            << num9(e.compression_rate) << "x | " << e.performance_note << '\n';
    }
    return oss.str();
}

std::string emit_rows(const std::vector<TrialReport>& trials) {
    std::ostringstream oss;
    oss << "# schema: splitkd.rows/1\n";
    if (!trials.empty()) {
        oss << "# scenario: " << trials.front().scenario_name
            << " seed=" << trials.front().seed << '\n';
    }
    oss << "method,regime,device,round,t_start_s,distance_m,snr_up_db,snr_down_db,"
           "cqi_up,cqi_down,bitrate_up_bps,bitrate_down_bps,feasible,outage,cut_index,"
           "gpu_frequency_hz,evaluated_candidates,delay_s,device_energy_j,server_energy_j,"
           "comm_energy_j,total_energy_j,device_forward_delay_s,uplink_smashed_delay_s,"
           "server_forward_backward_delay_s,downlink_gradients_delay_s,"
           "device_backward_delay_s,uplink_params_delay_s,device_forward_energy_j,"
           "uplink_smashed_energy_j,server_forward_backward_energy_j,"
           "downlink_gradients_energy_j,device_backward_energy_j,uplink_params_energy_j\n";
    for (const TrialReport& trial : trials) {
        for (const RoundRecord& r : trial.rounds) {
            oss << method_name(trial.method) << ',' << trial.regime << ','
                << r.device_index << ',' << r.round_index << ',' << num9(r.t_start_s) << ','
                << num9(r.link.distance_m) << ',' << num9(r.link.snr_up_db) << ','
                << num9(r.link.snr_down_db) << ',' << r.link.cqi_up << ',' << r.link.cqi_down
                << ',' << num9(r.link.bitrate_up_bps) << ',' << num9(r.link.bitrate_down_bps)
                << ',' << (r.feasible ? 1 : 0) << ',' << (r.outage ? 1 : 0) << ','
                << r.plan.cut_index << ',' << num9(r.plan.gpu_frequency_hz) << ','
                << r.evaluated_candidates;
            if (r.feasible && r.metrics) {
                const RoundMetrics& m = *r.metrics;
                oss << ',' << num9(m.delay_s) << ',' << num9(m.device_energy_j) << ','
                    << num9(m.server_energy_j) << ',' << num9(m.comm_energy_j) << ','
                    << num9(m.total_energy_j);
                for (const PhaseCost& p : m.phases) oss << ',' << num9(p.delay_s);
                for (const PhaseCost& p : m.phases) oss << ',' << num9(p.energy_j);
            } else {
                // cost fields absent, not zero: the round did not run
                for (int i = 0; i < 17; ++i) oss << ',';
            }
            oss << '\n';
        }
    }
    return oss.str();
}

std::string emit_summary(const ComparisonTable& table, const Scenario& scenario) {
    const TrainingConfig& t = scenario.training;
    std::ostringstream oss;
    oss << "# schema: splitkd.summary/1\n";
    oss << "scenario: " << table.scenario_name << "\nseed: " << table.seed << '\n';
    oss << "devices: " << scenario.devices.size()
        << " rounds_per_device: " << t.rounds_per_device << '\n';
    oss << "config: local_epochs=" << t.local_epochs
        << " batches_per_epoch=" << t.batches_per_epoch << " batch_size=" << t.batch_size
        << " wire_precision_bytes=" << t.wire_precision_bytes
        << " activation_compression_ratio=" << num9(t.activation_compression_ratio)
        << " delay_budget_s=" << num9(t.delay_budget_s) << " policy=" << policy_name(t.policy)
        << " include_server_static_energy=" << (t.include_server_static_energy ? 1 : 0)
        << " outage_retry_s=" << num9(t.outage_retry_s) << '\n';
    oss << '\n';
    oss << "regime,method,rounds,feasible,mean_delay_s,mean_energy_j,"
           "mean_device_energy_j,mean_server_energy_j,mean_comm_energy_j\n";
    for (const MethodComparison& row : table.regimes) {
        const std::pair<const char*, const TrialAggregates*> methods[] = {
            {"proposed", &row.proposed},
            {"server-only", &row.server_only},
            {"device-only", &row.device_only},
        };
        for (const auto& [label, agg] : methods) {
            oss << row.regime << ',' << label << ',' << agg->total_rounds << ','
                << agg->feasible_rounds << ',' << num9(agg->mean_delay_s) << ','
                << num9(agg->mean_total_energy_j) << ',' << num9(agg->mean_device_energy_j)
                << ',' << num9(agg->mean_server_energy_j) << ','
                << num9(agg->mean_comm_energy_j) << '\n';
        }
    }
    oss << '\n';
    oss << "regime,delay_reduction_vs_server_only_pct,delay_reduction_vs_device_only_pct,"
           "energy_reduction_vs_server_only_pct,energy_reduction_vs_device_only_pct\n";
    for (const MethodComparison& row : table.regimes) {
        oss << row.regime << ',' << num9(100.0 * row.delay_reduction_vs_server_only) << ','
            << num9(100.0 * row.delay_reduction_vs_device_only) << ','
            << num9(100.0 * row.energy_reduction_vs_server_only) << ','
            << num9(100.0 * row.energy_reduction_vs_device_only) << '\n';
    }
    return oss.str();
}

void write_file_atomic(const std::string& path, const std::string& content) {
    const std::filesystem::path target(path);
    std::filesystem::path tmp(target);
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot open for writing: " + tmp.string());
        out << content;
        out.flush();
        if (!out) throw std::runtime_error("write failed: " + tmp.string());
    }
    std::filesystem::rename(tmp, target);
}

}  // namespace splitkd

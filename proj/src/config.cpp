// SPDX-License-Identifier: Apache-2.0
#include "isac/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace isac {

using nlohmann::json;

namespace {

[[noreturn]] void schema_error(const std::string& path, const std::string& what) {
    throw ConfigError("config: " + path + ": " + what);
}

void check_keys(const json& obj, const std::string& path, std::initializer_list<const char*> allowed) {
    if (!obj.is_object()) schema_error(path.empty() ? "<root>" : path, "expected an object");
    const std::set<std::string> ok(allowed.begin(), allowed.end());
    for (const auto& [key, _] : obj.items())
        if (!ok.count(key)) schema_error(path.empty() ? key : path + "." + key, "unknown field");
}

std::string join(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }

void read(const json& obj, const std::string& path, const char* key, double& out) {
    if (!obj.contains(key)) return;
    const json& v = obj.at(key);
    if (!v.is_number()) schema_error(join(path, key), "expected a number");
    out = v.get<double>();
    if (!std::isfinite(out)) schema_error(join(path, key), "expected a finite number");
}

template <class Int>
void read_int(const json& obj, const std::string& path, const char* key, Int& out) {
    if (!obj.contains(key)) return;
    const json& v = obj.at(key);
    if (v.is_number_integer()) {
        if constexpr (std::is_unsigned_v<Int>) {
            if (v.is_number_unsigned()) {
                out = v.get<Int>();
                return;
            }
            if (v.get<long long>() < 0) schema_error(join(path, key), "expected a non-negative integer");
        }
        out = static_cast<Int>(v.get<long long>());
        return;
    }
    schema_error(join(path, key), "expected an integer");
}

void read(const json& obj, const std::string& path, const char* key, std::string& out) {
    if (!obj.contains(key)) return;
    const json& v = obj.at(key);
    if (!v.is_string()) schema_error(join(path, key), "expected a string");
    out = v.get<std::string>();
}

std::vector<double> read_grid(const json& v, const std::string& path) {
    std::vector<double> out;
    if (v.is_array()) {
        for (size_t i = 0; i < v.size(); ++i) {
            if (!v[i].is_number()) schema_error(path + "[" + std::to_string(i) + "]", "expected a number");
            out.push_back(v[i].get<double>());
        }
    } else if (v.is_object()) {
        check_keys(v, path, {"start", "stop", "step"});
        double start = 0, stop = 0, step = 0;
        for (const char* k : {"start", "stop", "step"})
            if (!v.contains(k)) schema_error(join(path, k), "missing field");
        read(v, path, "start", start);
        read(v, path, "stop", stop);
        read(v, path, "step", step);
        if (!(step > 0.0) || stop < start) schema_error(path, "need step > 0 and stop >= start");
        const auto n = static_cast<long>(std::floor((stop - start) / step + 1e-9));
        for (long i = 0; i <= n; ++i) out.push_back(start + static_cast<double>(i) * step);
    } else {
        schema_error(path, "expected a list of numbers or {start, stop, step}");
    }
    if (out.empty()) schema_error(path, "grid must not be empty");
    return out;
}

PolicySpec read_policy(const json& v, const std::string& path) {
    if (!v.is_object() || !v.contains("kind") || !v.at("kind").is_string())
        schema_error(path, "expected an object with a string field 'kind'");
    const auto kind = v.at("kind").get<std::string>();
    if (kind == "pure_comm") {
        check_keys(v, path, {"kind"});
        return PureComm{};
    }
    if (kind == "time_sharing") {
        check_keys(v, path, {"kind", "beta"});
        TimeSharing p;
        read(v, path, "beta", p.beta);
        return p;
    }
    if (kind == "concurrent") {
        check_keys(v, path, {"kind", "rho"});
        Concurrent p;
        read(v, path, "rho", p.rho);
        return p;
    }
    schema_error(join(path, "kind"), "unknown policy '" + kind + "' (pure_comm, time_sharing, concurrent)");
}

json write_policy(const PolicySpec& p) {
    json j{{"kind", policy_name(p)}};
    if (const auto* ts = std::get_if<TimeSharing>(&p)) j["beta"] = ts->beta;
    if (const auto* c = std::get_if<Concurrent>(&p)) j["rho"] = c->rho;
    return j;
}

}  // namespace

double preset_target_angle_deg(const std::string& preset) {
    if (preset == "low") return 43.0;
    if (preset == "mid") return -25.0;
    if (preset == "high") return -58.0;
    throw ConfigError("config: scenario.preset: unknown preset '" + preset + "' (low, mid, high, custom)");
}

RunConfig::RunConfig()
    : policies{PureComm{}, Concurrent{0.5}, TimeSharing{1.0}, TimeSharing{200.0}},
      ts_grid_ms{0.2, 0.3, 0.5, 1.0, 2.0, 3.0, 4.0, 5.0, 6.0} {}

bool operator==(const RunConfig& a, const RunConfig& b) { return serialize_config(a) == serialize_config(b); }

Scenario RunConfig::scenario() const {
    Scenario sc;
    auto& p = sc.params;
    p.carrier_hz = carrier_frequency_hz;
    p.transmit_power_w = dbm_to_watt(transmit_power_dbm);
    p.antennas = antennas;
    p.bandwidth_hz = bandwidth_hz;
    p.noise_psd = dbm_to_watt(noise_psd_dbm_per_hz);
    p.packet_bits = packet_bits;
    p.packet_rate_hz = packet_rate_per_bandwidth * bandwidth_hz;
    p.modulation_order = modulation_order;
    p.max_sweep_angle = deg_to_rad(max_sweep_angle_deg);
    p.sensing_window_s = sensing_window_ms * 1e-3;
    p.p_fa = p_fa;

    if (!(carrier_frequency_hz > 0.0)) throw ConfigError("config: system.carrier_frequency_hz: must be positive");
    const double lambda = p.wavelength();
    if (!(user.distance_m > 0.0)) throw ConfigError("config: scenario.user.distance_m: must be positive");
    sc.geometry.user = UserGeometry::make(deg_to_rad(user.angle_deg), user.distance_m, lambda);
    for (size_t i = 0; i < targets.size(); ++i) {
        const auto& t = targets[i];
        if (!(t.distance_m > 0.0))
            throw ConfigError("config: scenario.targets[" + std::to_string(i) + "].distance_m: must be positive");
        sc.geometry.targets.push_back(
            TargetGeometry::make(deg_to_rad(t.angle_deg), t.distance_m, db_to_linear(t.rcs_dbsm), lambda));
    }

    sc.detector.grid_step = deg_to_rad(grid_step_deg);
    sc.detector.training_cells = training_cells;
    sc.detector.guard_cells = guard_cells;
    sc.detector.hit_tolerance = deg_to_rad(hit_tolerance_deg);
    sc.normalization = normalization;
    sc.warmup_windows = warmup_windows;
    return sc;
}

void RunConfig::validate() const {
    if (preset != "custom") preset_target_angle_deg(preset);
    if (trials < 1) throw ConfigError("config: trials: must be >= 1");
    if (output_dir.empty()) throw ConfigError("config: output_dir: must not be empty");
    if (policies.empty()) throw ConfigError("config: policies: at least one policy is required");
    for (size_t i = 0; i < policies.size(); ++i)
        for (size_t j = 0; j < i; ++j)
            if (policies[i] == policies[j])
                throw ConfigError("config: policies[" + std::to_string(i) + "]: duplicate of policies[" +
                                  std::to_string(j) + "]");
    if (!(power_audit_horizon_s >= 0.0)) throw ConfigError("config: power_audit_horizon_s: must be >= 0");
    for (const auto& [name, grid] : {std::pair{"sweeps.rcs_dbsm", &rcs_grid_dbsm}, std::pair{"sweeps.ts_ms", &ts_grid_ms},
                                     std::pair{"sweeps.rho", &rho_grid}, std::pair{"sweeps.beta", &beta_grid}})
        if (grid->empty()) throw ConfigError(std::string("config: ") + name + ": grid must not be empty");

    const Scenario sc = scenario();
    for (const auto& pol : policies) sc.validate(pol);
    // Tradeoff grids only need the time-sharing feasibility when that subcommand runs.
    for (double r : rho_grid) validate_policy(Concurrent{r});
    for (double b : beta_grid) validate_policy(TimeSharing{b});
    for (double ts : ts_grid_ms) {
        Scenario s = sc;
        s.params.sensing_window_s = ts * 1e-3;
        for (const auto& pol : policies) s.validate(pol);
    }
}

RunConfig parse_config(const std::string& text) {
    RunConfig c;
    if (std::all_of(text.begin(), text.end(), [](unsigned char ch) { return std::isspace(ch); })) {
        c.validate();
        return c;
    }
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config: not valid JSON: ") + e.what());
    }
    check_keys(root, "", {"system", "scenario", "detector", "policies", "precoder_normalization", "warmup_windows",
                          "sweeps", "trials", "seed", "output_dir", "power_audit_horizon_s"});

    if (root.contains("system")) {
        const json& s = root["system"];
        const std::string p = "system";
        check_keys(s, p, {"carrier_frequency_hz", "transmit_power_dbm", "antennas", "bandwidth_hz",
                          "noise_psd_dbm_per_hz", "packet_bits", "packet_rate_per_bandwidth", "modulation_order",
                          "max_sweep_angle_deg", "sensing_window_ms", "p_fa"});
        read(s, p, "carrier_frequency_hz", c.carrier_frequency_hz);
        read(s, p, "transmit_power_dbm", c.transmit_power_dbm);
        read_int(s, p, "antennas", c.antennas);
        read(s, p, "bandwidth_hz", c.bandwidth_hz);
        read(s, p, "noise_psd_dbm_per_hz", c.noise_psd_dbm_per_hz);
        read_int(s, p, "packet_bits", c.packet_bits);
        read(s, p, "packet_rate_per_bandwidth", c.packet_rate_per_bandwidth);
        read_int(s, p, "modulation_order", c.modulation_order);
        read(s, p, "max_sweep_angle_deg", c.max_sweep_angle_deg);
        read(s, p, "sensing_window_ms", c.sensing_window_ms);
        read(s, p, "p_fa", c.p_fa);
    }

    if (root.contains("scenario")) {
        const json& s = root["scenario"];
        check_keys(s, "scenario", {"preset", "user", "targets"});
        read(s, "scenario", "preset", c.preset);
        const double default_angle = c.preset == "custom" ? RunConfig::Target{}.angle_deg
                                                          : preset_target_angle_deg(c.preset);
        c.targets = {RunConfig::Target{default_angle}};
        if (s.contains("user")) {
            check_keys(s["user"], "scenario.user", {"angle_deg", "distance_m"});
            read(s["user"], "scenario.user", "angle_deg", c.user.angle_deg);
            read(s["user"], "scenario.user", "distance_m", c.user.distance_m);
        }
        if (s.contains("targets")) {
            const json& ts = s["targets"];
            if (!ts.is_array()) schema_error("scenario.targets", "expected a list");
            c.targets.clear();
            for (size_t i = 0; i < ts.size(); ++i) {
                const std::string p = "scenario.targets[" + std::to_string(i) + "]";
                check_keys(ts[i], p, {"angle_deg", "distance_m", "rcs_dbsm"});
                RunConfig::Target t{default_angle};
                read(ts[i], p, "angle_deg", t.angle_deg);
                read(ts[i], p, "distance_m", t.distance_m);
                read(ts[i], p, "rcs_dbsm", t.rcs_dbsm);
                c.targets.push_back(t);
            }
        }
    }

    if (root.contains("detector")) {
        const json& d = root["detector"];
        check_keys(d, "detector", {"grid_step_deg", "training_cells", "guard_cells", "hit_tolerance_deg"});
        read(d, "detector", "grid_step_deg", c.grid_step_deg);
        read_int(d, "detector", "training_cells", c.training_cells);
        read_int(d, "detector", "guard_cells", c.guard_cells);
        read(d, "detector", "hit_tolerance_deg", c.hit_tolerance_deg);
    }

    if (root.contains("policies")) {
        const json& ps = root["policies"];
        if (!ps.is_array()) schema_error("policies", "expected a list");
        c.policies.clear();
        for (size_t i = 0; i < ps.size(); ++i) c.policies.push_back(read_policy(ps[i], "policies[" + std::to_string(i) + "]"));
    }

    if (root.contains("precoder_normalization")) {
        std::string mode;
        read(root, "", "precoder_normalization", mode);
        if (mode == "per_slot") c.normalization = PrecoderNormalization::PerSlot;
        else if (mode == "cycle_average") c.normalization = PrecoderNormalization::CycleAverage;
        else schema_error("precoder_normalization", "expected 'per_slot' or 'cycle_average'");
    }
    read_int(root, "", "warmup_windows", c.warmup_windows);

    if (root.contains("sweeps")) {
        const json& s = root["sweeps"];
        check_keys(s, "sweeps", {"rcs_dbsm", "ts_ms", "rho", "beta"});
        if (s.contains("rcs_dbsm")) c.rcs_grid_dbsm = read_grid(s["rcs_dbsm"], "sweeps.rcs_dbsm");
        if (s.contains("ts_ms")) c.ts_grid_ms = read_grid(s["ts_ms"], "sweeps.ts_ms");
        if (s.contains("rho")) c.rho_grid = read_grid(s["rho"], "sweeps.rho");
        if (s.contains("beta")) c.beta_grid = read_grid(s["beta"], "sweeps.beta");
    }

    read_int(root, "", "trials", c.trials);
    read_int(root, "", "seed", c.seed);
    read(root, "", "output_dir", c.output_dir);
    read(root, "", "power_audit_horizon_s", c.power_audit_horizon_s);

    c.validate();
    return c;
}

RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("config: cannot open '" + path.string() + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

std::string serialize_config(const RunConfig& c) {
    json root;
    root["system"] = {
        {"carrier_frequency_hz", c.carrier_frequency_hz},
        {"transmit_power_dbm", c.transmit_power_dbm},
        {"antennas", c.antennas},
        {"bandwidth_hz", c.bandwidth_hz},
        {"noise_psd_dbm_per_hz", c.noise_psd_dbm_per_hz},
        {"packet_bits", c.packet_bits},
        {"packet_rate_per_bandwidth", c.packet_rate_per_bandwidth},
        {"modulation_order", c.modulation_order},
        {"max_sweep_angle_deg", c.max_sweep_angle_deg},
        {"sensing_window_ms", c.sensing_window_ms},
        {"p_fa", c.p_fa},
    };
    json targets = json::array();
    for (const auto& t : c.targets)
        targets.push_back({{"angle_deg", t.angle_deg}, {"distance_m", t.distance_m}, {"rcs_dbsm", t.rcs_dbsm}});
    root["scenario"] = {
        {"preset", c.preset},
        {"user", {{"angle_deg", c.user.angle_deg}, {"distance_m", c.user.distance_m}}},
        {"targets", targets},
    };
    root["detector"] = {
        {"grid_step_deg", c.grid_step_deg},
        {"training_cells", c.training_cells},
        {"guard_cells", c.guard_cells},
        {"hit_tolerance_deg", c.hit_tolerance_deg},
    };
    json policies = json::array();
    for (const auto& p : c.policies) policies.push_back(write_policy(p));
    root["policies"] = policies;
    root["precoder_normalization"] =
        c.normalization == PrecoderNormalization::PerSlot ? "per_slot" : "cycle_average";
    root["warmup_windows"] = c.warmup_windows;
    root["sweeps"] = {
        {"rcs_dbsm", c.rcs_grid_dbsm},
        {"ts_ms", c.ts_grid_ms},
        {"rho", c.rho_grid},
        {"beta", c.beta_grid},
    };
    root["trials"] = c.trials;
    root["seed"] = c.seed;
    root["output_dir"] = c.output_dir;
    root["power_audit_horizon_s"] = c.power_audit_horizon_s;
    return root.dump(2) + "\n";
}

}  // namespace isac

// SPDX-License-Identifier: Apache-2.0
#include "isac/report.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#ifndef ISACSIM_VERSION
#define ISACSIM_VERSION "0.0.0"
#endif

namespace isac {

namespace fs = std::filesystem;
using nlohmann::json;

std::string version() { return ISACSIM_VERSION; }

Subcommand parse_subcommand(const std::string& name) {
    if (name == "rcs-sweep") return Subcommand::RcsSweep;
    if (name == "ts-sweep") return Subcommand::TsSweep;
    if (name == "tradeoff") return Subcommand::Tradeoff;
    if (name == "single") return Subcommand::Single;
    throw ConfigError("unknown subcommand '" + name + "' (rcs-sweep, ts-sweep, tradeoff, single)");
}

std::string subcommand_name(Subcommand sub) {
    switch (sub) {
        case Subcommand::RcsSweep: return "rcs-sweep";
        case Subcommand::TsSweep: return "ts-sweep";
        case Subcommand::Tradeoff: return "tradeoff";
        case Subcommand::Single: return "single";
    }
    return "?";
}

namespace {

std::string num(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

std::string short_num(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%g", v);
    return buf;
}

}  // namespace

std::string csv_header() {
    return "sweep_param_name,sweep_value,policy,policy_param,p_d,p_fa_window,mean_snr_db,mean_m,n_trials,seed";
}

std::string format_csv(const SweepResult& r) {
    std::ostringstream out;
    out << csv_header() << '\n';
    for (const auto& row : r.rows) {
        const double param = policy_parameter(row.policy);
        out << r.parameter << ',' << (r.parameter == "none" ? "" : num(row.value)) << ','
            << policy_name(row.policy) << ',' << (std::isnan(param) ? "" : num(param)) << ',' << num(row.mc.p_d)
            << ',' << num(row.mc.p_fa_window) << ',' << num(row.mc.mean_snr_db) << ','
            << num(row.mc.mean_observations) << ',' << row.mc.n_trials << ',' << row.mc.seed << '\n';
    }
    return out.str();
}

std::string csv_stem(Subcommand sub, const PolicySpec& policy) {
    std::string stem = subcommand_name(sub) + "_" + policy_name(policy);
    // Tradeoff files hold a whole parameter curve, so the parameter is not part of the name.
    if (sub != Subcommand::Tradeoff && !std::holds_alternative<PureComm>(policy))
        stem += "_" + policy_parameter_name(policy) + short_num(policy_parameter(policy));
    return stem;
}

std::vector<SweepResult> simulate(const RunConfig& config, Subcommand sub, int workers) {
    config.validate();
    const Scenario sc = config.scenario();
    SweepOptions opt;
    opt.n_trials = config.trials;
    opt.seed = config.seed;
    opt.workers = workers > 0 ? workers : default_workers();
    opt.audit_horizon_s = config.power_audit_horizon_s;

    switch (sub) {
        case Subcommand::RcsSweep: return sweep_rcs(sc, config.policies, config.rcs_grid_dbsm, opt);
        case Subcommand::TsSweep: {
            std::vector<double> ts_s;
            for (double ms : config.ts_grid_ms) ts_s.push_back(ms * 1e-3);
            return sweep_ts(sc, config.policies, ts_s, opt);
        }
        case Subcommand::Tradeoff: {
            TradeoffResult t = tradeoff_curve(sc, config.rho_grid, config.beta_grid, opt);
            return {std::move(t.pure_comm), std::move(t.concurrent), std::move(t.time_sharing)};
        }
        case Subcommand::Single: {
            std::vector<SweepResult> out;
            for (const auto& pol : config.policies) {
                SweepRow row;
                row.value = 0.0;
                row.policy = pol;
                row.mc = monte_carlo(sc, pol, opt.n_trials, opt.seed, opt.workers);
                if (opt.audit_horizon_s > 0.0) row.power = audit_power(sc, pol, opt.audit_horizon_s, opt.seed);
                out.push_back(SweepResult{"none", pol, {std::move(row)}, opt.n_trials, opt.seed});
            }
            return out;
        }
    }
    throw std::logic_error("unhandled subcommand");
}

namespace {

json deviation_flags(const RunConfig& c) {
    return json{
        {"precoder_normalization", c.normalization == PrecoderNormalization::PerSlot ? "per_slot" : "cycle_average"},
        {"target_phase", "uniform random per trial"},
        {"cfar_guard_cells", c.guard_cells},
        {"cfar_guard_cells_note", "guard region widened to cover the array mainlobe at the default grid step"},
        {"window_scoring", "warm-up windows then one scored window per trial; M = 0 scored as a miss"},
    };
}

json conventions(const RunConfig& c) {
    return json{
        {"snr_aggregation", "linear mean over data slots, reported in dB"},
        {"angles", "degrees"},
        {"p_fa_window", "fraction of target-free companion windows (same noise) with at least one detection"},
        {"mean_m", "mean number of sensing observations in the scored window"},
        {"warmup_windows", c.warmup_windows},
        {"rng", "std::mt19937_64 seeded with seed_seq(seed, trial)"},
    };
}

json rows_json(const SweepResult& r) {
    json rows = json::array();
    for (const auto& row : r.rows) {
        json j{
            {"sweep_value", r.parameter == "none" ? json(nullptr) : json(row.value)},
            {"p_d_per_target", row.mc.p_d_per_target},
            {"mean_false_detections", row.mc.mean_false_detections},
            {"snr_samples", row.mc.snr_samples},
        };
        if (row.power.windows > 0)
            j["power_audit"] = {{"realized_w", row.power.realized_w},
                                {"target_w", row.power.target_w},
                                {"relative_error", row.power.relative_error},
                                {"windows", row.power.windows},
                                {"packets", row.power.packets}};
        rows.push_back(std::move(j));
    }
    return rows;
}

/// Writes to a sibling temporary and renames it into place.
void write_atomic(const fs::path& path, const std::string& content, std::vector<fs::path>& staged) {
    fs::path tmp = path;
    tmp += ".partial";
    staged.push_back(tmp);
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write '" + tmp.string() + "'");
        out << content;
        out.flush();
        if (!out) throw std::runtime_error("write failed for '" + tmp.string() + "'");
    }
    fs::rename(tmp, path);
    staged.back() = path;
}

}  // namespace

RunArtifacts run(const RunConfig& config, Subcommand sub, int workers) {
    config.validate();
    const fs::path dir = config.output_dir;
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir))
        throw std::runtime_error("output directory '" + dir.string() + "' is not usable: " + ec.message());

    RunArtifacts art;
    art.results = simulate(config, sub, workers);

    std::vector<fs::path> written;
    try {
        json files = json::array();
        std::set<std::string> stems;
        for (const auto& r : art.results) {
            const std::string stem = csv_stem(sub, r.policy);
            if (!stems.insert(stem).second) throw ConfigError("config: policies: duplicate policy '" + stem + "'");
            const fs::path path = dir / (stem + ".csv");
            write_atomic(path, format_csv(r), written);
            art.csv_files.push_back(path);
            files.push_back({{"file", path.filename().string()},
                             {"sweep_param_name", r.parameter},
                             {"policy", policy_name(r.policy)},
                             {"rows", rows_json(r)}});
        }
        json meta{
            {"subcommand", subcommand_name(sub)},
            {"version", version()},
            {"config", json::parse(serialize_config(config))},
            {"deviation_flags", deviation_flags(config)},
            {"conventions", conventions(config)},
            {"files", files},
        };
        art.metadata = dir / (subcommand_name(sub) + "_metadata.json");
        write_atomic(art.metadata, meta.dump(2) + "\n", written);
    } catch (...) {
        for (const auto& p : written) fs::remove(p, ec);
        throw;
    }
    return art;
}

}  // namespace isac

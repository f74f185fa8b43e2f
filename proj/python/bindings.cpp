// SPDX-License-Identifier: Apache-2.0
#include <optional>
#include <string>

#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "isac/config.hpp"
#include "isac/report.hpp"

namespace py = pybind11;
using namespace isac;

namespace {

PolicySpec to_policy(const py::dict& d) {
    const auto kind = d.contains("kind") ? py::str(d["kind"]).cast<std::string>() : std::string();
    PolicySpec p;
    if (kind == "pure_comm") p = PureComm{};
    else if (kind == "time_sharing") p = TimeSharing{d.contains("beta") ? d["beta"].cast<double>() : 1.0};
    else if (kind == "concurrent") p = Concurrent{d.contains("rho") ? d["rho"].cast<double>() : 0.5};
    else throw ConfigError("policy: unknown kind '" + kind + "' (pure_comm, time_sharing, concurrent)");
    validate_policy(p);
    return p;
}

py::dict policy_dict(const PolicySpec& p) {
    py::dict d;
    d["kind"] = policy_name(p);
    if (!std::holds_alternative<PureComm>(p)) d[py::str(policy_parameter_name(p))] = policy_parameter(p);
    return d;
}

py::dict mc_dict(const MonteCarloResult& r) {
    py::dict d;
    d["p_d"] = r.p_d;
    d["p_d_per_target"] = r.p_d_per_target;
    d["p_fa_window"] = r.p_fa_window;
    d["mean_snr_linear"] = r.mean_snr_linear;
    d["mean_snr_db"] = r.mean_snr_db;
    d["mean_m"] = r.mean_observations;
    d["mean_false_detections"] = r.mean_false_detections;
    d["snr_samples"] = r.snr_samples;
    d["n_trials"] = r.n_trials;
    d["seed"] = r.seed;
    return d;
}

py::dict audit_dict(const PowerAudit& a) {
    py::dict d;
    d["realized_w"] = a.realized_w;
    d["target_w"] = a.target_w;
    d["relative_error"] = a.relative_error;
    d["windows"] = a.windows;
    d["packets"] = a.packets;
    return d;
}

RunConfig resolve(const std::string& config_json, std::optional<long> trials, std::optional<std::uint64_t> seed,
                  std::optional<std::string> out_dir) {
    RunConfig c = parse_config(config_json);
    if (trials) c.trials = *trials;
    if (seed) c.seed = *seed;
    if (out_dir) c.output_dir = *out_dir;
    c.validate();
    return c;
}

}  // namespace

PYBIND11_MODULE(_isacsim, m) {
    m.doc() = "Monte Carlo ISAC link simulator";
    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);

    m.def("version", &version);
    m.def("csv_header", &csv_header);
    m.def("default_config", [] { return serialize_config(RunConfig{}); },
          "Default configuration as JSON text.");
    m.def("normalize_config", [](const std::string& text) { return serialize_config(parse_config(text)); },
          py::arg("text"), "Parses and validates JSON config text; returns it with all defaults filled in.");

    m.def(
        "simulate",
        [](const std::string& config_json, const std::string& subcommand, std::optional<long> trials,
           std::optional<std::uint64_t> seed, int workers) {
            const RunConfig c = resolve(config_json, trials, seed, std::nullopt);
            const Subcommand sub = parse_subcommand(subcommand);
            std::vector<SweepResult> results;
            {
                py::gil_scoped_release release;
                results = simulate(c, sub, workers);
            }
            py::list out;
            for (const auto& r : results) {
                py::dict d;
                d["sweep_param_name"] = r.parameter;
                d["policy"] = policy_dict(r.policy);
                d["stem"] = csv_stem(sub, r.policy);
                d["csv"] = format_csv(r);
                py::list rows;
                for (const auto& row : r.rows) {
                    py::dict rd;
                    rd["sweep_value"] = row.value;
                    rd["policy"] = policy_dict(row.policy);
                    rd["mc"] = mc_dict(row.mc);
                    rd["power"] = audit_dict(row.power);
                    rows.append(rd);
                }
                d["rows"] = rows;
                out.append(d);
            }
            return out;
        },
        py::arg("config_json") = "", py::arg("subcommand") = "single", py::arg("trials") = py::none(),
        py::arg("seed") = py::none(), py::arg("workers") = 0);

    m.def(
        "run",
        [](const std::string& config_json, const std::string& subcommand, std::optional<std::string> out_dir,
           std::optional<long> trials, std::optional<std::uint64_t> seed, int workers) {
            const RunConfig c = resolve(config_json, trials, seed, out_dir);
            const Subcommand sub = parse_subcommand(subcommand);
            RunArtifacts art;
            {
                py::gil_scoped_release release;
                art = run(c, sub, workers);
            }
            py::dict d;
            std::vector<std::string> files;
            for (const auto& f : art.csv_files) files.push_back(f.string());
            d["csv_files"] = files;
            d["metadata"] = art.metadata.string();
            return d;
        },
        py::arg("config_json") = "", py::arg("subcommand") = "single", py::arg("out_dir") = py::none(),
        py::arg("trials") = py::none(), py::arg("seed") = py::none(), py::arg("workers") = 0,
        "Runs a subcommand and writes CSV and metadata files; returns their paths.");

    m.def(
        "monte_carlo",
        [](const std::string& config_json, const py::dict& policy, long trials, std::uint64_t seed, int workers) {
            const RunConfig c = parse_config(config_json);
            const PolicySpec p = to_policy(policy);
            const Scenario sc = c.scenario();
            sc.validate(p);
            MonteCarloResult r;
            {
                py::gil_scoped_release release;
                r = monte_carlo(sc, p, trials, seed, workers);
            }
            return mc_dict(r);
        },
        py::arg("config_json") = "", py::arg("policy") = py::dict(py::arg("kind") = "pure_comm"),
        py::arg("trials") = 100, py::arg("seed") = 1, py::arg("workers") = 0);

    m.def(
        "audit_power",
        [](const std::string& config_json, const py::dict& policy, double horizon_s, std::uint64_t seed) {
            const RunConfig c = parse_config(config_json);
            const PolicySpec p = to_policy(policy);
            const Scenario sc = c.scenario();
            sc.validate(p);
            PowerAudit a;
            {
                py::gil_scoped_release release;
                a = audit_power(sc, p, horizon_s, seed);
            }
            return audit_dict(a);
        },
        py::arg("config_json") = "", py::arg("policy") = py::dict(py::arg("kind") = "pure_comm"),
        py::arg("horizon_s") = 1.0, py::arg("seed") = 1);

    m.def("steering_vector", &steering_vector, py::arg("theta_rad"), py::arg("antennas"));
    m.def("comm_gain", &comm_gain, py::arg("distance_m"), py::arg("wavelength_m"));
    m.def("radar_gain", &radar_gain, py::arg("distance_m"), py::arg("rcs_m2"), py::arg("wavelength_m"));
    m.def("codebook_angle", &codebook_angle, py::arg("n"), py::arg("count"), py::arg("theta_max_rad"));
    m.def("cfar_multiplier", &cfar_multiplier, py::arg("p_fa"), py::arg("training_cells"));
    m.def(
        "glrt_map",
        [](const std::vector<ComplexVec>& ys, const std::vector<ComplexVec>& ss, const std::vector<double>& grid) {
            if (ys.size() != ss.size()) throw ConfigError("glrt_map: ys and ss differ in length");
            std::vector<SensingObservation> obs;
            for (size_t i = 0; i < ys.size(); ++i) obs.push_back({ys[i], ss[i], static_cast<long>(i)});
            const GlrtMap map = isac::glrt_map(obs, AngleGrid{grid});
            return py::make_tuple(map.chi, map.alpha_hat);
        },
        py::arg("ys"), py::arg("ss"), py::arg("grid_rad"),
        "Per-cell GLRT statistic and gain estimate for observations y_m = echo(s_m) + noise.");
}

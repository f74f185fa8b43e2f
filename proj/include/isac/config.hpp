// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "isac/engine.hpp"

namespace isac {

/// A run as the user wrote it, in presentation units (degrees, dBm, dBsm, ms).
///
/// Values stay in these units so that serialization round-trips exactly; `scenario()`
/// converts to SI.
struct RunConfig {
    // system
    double carrier_frequency_hz = 5e9;
    double transmit_power_dbm = 20.0;
    int antennas = 16;
    double bandwidth_hz = 10e6;
    double noise_psd_dbm_per_hz = -174.0;
    int packet_bits = 1000;
    double packet_rate_per_bandwidth = 1e-4;
    int modulation_order = 2;
    double max_sweep_angle_deg = 70.0;
    double sensing_window_ms = 0.3;
    double p_fa = 1e-2;

    // scenario
    struct User {
        double angle_deg = 40.0;
        double distance_m = 500.0;
        friend bool operator==(const User&, const User&) = default;
    };
    struct Target {
        double angle_deg = 43.0;
        double distance_m = 80.0;
        double rcs_dbsm = 5.0;
        friend bool operator==(const Target&, const Target&) = default;
    };
    std::string preset = "low";   // low | mid | high | custom
    User user;
    std::vector<Target> targets{Target{}};

    // detector
    double grid_step_deg = 0.5;
    int training_cells = 16;
    int guard_cells = 24;
    double hit_tolerance_deg = 4.0;

    std::vector<PolicySpec> policies;
    PrecoderNormalization normalization = PrecoderNormalization::PerSlot;
    int warmup_windows = 5;

    // sweep grids
    std::vector<double> rcs_grid_dbsm = default_rcs_grid_dbsm();
    std::vector<double> ts_grid_ms;
    std::vector<double> rho_grid = default_rho_grid();
    std::vector<double> beta_grid = default_beta_grid();

    long trials = 2000;
    std::uint64_t seed = 1;
    std::string output_dir = "results";
    double power_audit_horizon_s = 40.0;

    RunConfig();

    /// SI-unit scenario for the configured geometry.
    Scenario scenario() const;
    /// Every module precondition for every configured policy and sweep point.
    void validate() const;

    friend bool operator==(const RunConfig&, const RunConfig&);
};

/// Target angle of a named geometry preset [deg]: low 43, mid -25, high -58.
double preset_target_angle_deg(const std::string& preset);

/// Parses JSON text; empty input yields the defaults. Throws ConfigError with the field path.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::filesystem::path& path);
std::string serialize_config(const RunConfig& config);

}  // namespace isac

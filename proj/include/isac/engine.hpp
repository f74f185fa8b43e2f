// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "isac/channel.hpp"
#include "isac/detector.hpp"
#include "isac/policy.hpp"
#include "isac/traffic.hpp"

namespace isac {

struct DetectorSettings {
    double grid_step = 0.5 * kPi / 180.0;
    int training_cells = 16;
    int guard_cells = 24;
    double hit_tolerance = 4.0 * kPi / 180.0;
};

/// Everything that defines one simulated operating point apart from the policy.
struct Scenario {
    SystemParams params;
    ScenarioGeometry geometry;
    DetectorSettings detector;
    PrecoderNormalization normalization = PrecoderNormalization::PerSlot;
    int warmup_windows = 5;

    AngleGrid grid() const;
    /// Checks the system, geometry, detector and policy together; throws ConfigError.
    void validate(const PolicySpec& policy) const;
};

struct WindowResult {
    int observations = 0;
    std::vector<bool> hits;          // per target
    int false_detections = 0;
    int h0_detections = 0;           // same noise, targets removed
    std::vector<double> snr;         // linear SNR_c of every data slot
    double energy = 0.0;             // J radiated in the window
    long data_slots = 0;
    long pilot_slots = 0;
    GlrtMap h1_map;                  // filled only when WindowInput::keep_maps is set
    GlrtMap h0_map;
};

struct WindowInput {
    BufferState buffer;
    SweepState sweep;
    double start_time = 0.0;
    long index = 0;
    bool keep_maps = false;
};

struct WindowOutcome {
    WindowResult result;
    BufferState buffer;
    SweepState sweep;
};

/// Simulates one sensing window. With `sense` false only traffic and sweep state advance
/// (warm-up); no symbols or noise are drawn.
WindowOutcome run_window(const Scenario& scenario, const PolicySpec& policy, std::span<const TargetEcho> echoes,
                         const WindowInput& in, Rng& rng, bool sense = true);

struct MonteCarloResult {
    std::vector<double> p_d_per_target;
    double p_d = 0.0;                // mean over targets
    double p_fa_window = 0.0;        // target-free companion windows with >= 1 detection
    double mean_snr_linear = 0.0;    // over all data slots of all scored windows
    double mean_snr_db = 0.0;        // NaN when no data slot was scored
    double mean_observations = 0.0;
    double mean_false_detections = 0.0;
    long snr_samples = 0;
    long n_trials = 0;
    std::uint64_t seed = 0;
};

/// Trial t runs `warmup_windows` unsensed windows and one scored window on Rng(seed, t).
MonteCarloResult monte_carlo(const Scenario& scenario, const PolicySpec& policy, long n_trials,
                             std::uint64_t seed, int workers = 0);

struct PowerAudit {
    double realized_w = 0.0;
    double target_w = 0.0;
    double relative_error = 0.0;
    long windows = 0;
    long packets = 0;
};

/// Radiated energy over a continuous trajectory of at least `horizon_s` seconds, divided by time.
PowerAudit audit_power(const Scenario& scenario, const PolicySpec& policy, double horizon_s, std::uint64_t seed);

struct SweepRow {
    double value = 0.0;
    PolicySpec policy;
    MonteCarloResult mc;
    PowerAudit power;
};

struct SweepResult {
    std::string parameter;   // "rcs_dbsm", "ts_ms", "rho", "beta"
    PolicySpec policy;
    std::vector<SweepRow> rows;
    long n_trials = 0;
    std::uint64_t seed = 0;
};

struct SweepOptions {
    long n_trials = 2000;
    std::uint64_t seed = 1;
    int workers = 0;
    double audit_horizon_s = 40.0;   // 0 disables the power audit
};

/// P_D against target RCS [dBsm] applied to every target.
std::vector<SweepResult> sweep_rcs(const Scenario& tmpl, const std::vector<PolicySpec>& policies,
                                   const std::vector<double>& rcs_dbsm, const SweepOptions& opt);

/// P_D against sensing window length [s].
std::vector<SweepResult> sweep_ts(const Scenario& tmpl, const std::vector<PolicySpec>& policies,
                                  const std::vector<double>& ts_s, const SweepOptions& opt);

struct TradeoffResult {
    SweepResult pure_comm;
    SweepResult concurrent;
    SweepResult time_sharing;
};

TradeoffResult tradeoff_curve(const Scenario& tmpl, const std::vector<double>& rho,
                              const std::vector<double>& beta, const SweepOptions& opt);

/// Worker count: ISACSIM_WORKERS if set, else hardware concurrency.
int default_workers();

/// Standard grids.
std::vector<double> default_rcs_grid_dbsm();   // -30 .. 10 step 2.5
std::vector<double> default_ts_grid_s();       // 0.2 .. 6 ms
std::vector<double> default_rho_grid();        // 0 .. 1 step 0.1
std::vector<double> default_beta_grid();       // 0 .. 200

}  // namespace isac

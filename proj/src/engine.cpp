// SPDX-License-Identifier: Apache-2.0
#include "isac/engine.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <limits>
#include <mutex>
#include <thread>

namespace isac {

AngleGrid Scenario::grid() const {
    return AngleGrid::uniform(-params.max_sweep_angle, params.max_sweep_angle, detector.grid_step);
}

void Scenario::validate(const PolicySpec& policy) const {
    params.validate();
    validate_policy(policy);
    if (std::holds_alternative<TimeSharing>(policy)) {
        check_time_sharing_feasible(params);
        if (params.slots_per_window() < params.antennas)
            throw ConfigError("sensing window shorter than the N pilot slots of time sharing");
    }
    auto in_range = [](double th) { return th >= -kPi / 2 - 1e-12 && th <= kPi / 2 + 1e-12; };
    if (!in_range(geometry.user.theta)) throw ConfigError("user angle must lie in [-90, 90] degrees");
    if (!(geometry.user.distance > 0.0)) throw ConfigError("user distance must be positive");
    for (const auto& t : geometry.targets) {
        if (!in_range(t.theta)) throw ConfigError("target angle must lie in [-90, 90] degrees");
        if (!(t.distance > 0.0)) throw ConfigError("target distance must be positive");
        if (!(t.rcs > 0.0)) throw ConfigError("target RCS must be positive");
    }
    if (!(detector.grid_step > 0.0)) throw ConfigError("detector grid step must be positive");
    if (!(detector.hit_tolerance > 0.0)) throw ConfigError("hit tolerance must be positive");
    if (detector.training_cells < 2 || detector.training_cells % 2 != 0)
        throw ConfigError("CFAR training cells must be a positive even count");
    if (detector.guard_cells < 0) throw ConfigError("CFAR guard cells must be non-negative");
    const auto cells = static_cast<long>(grid().size());
    if (cells <= detector.training_cells + 2L * detector.guard_cells + 1)
        throw ConfigError("angle grid too short for CFAR: need more than N_c + 2 N_g + 1 = " +
                          std::to_string(detector.training_cells + 2 * detector.guard_cells + 1) + " cells, have " +
                          std::to_string(cells));
    if (warmup_windows < 0) throw ConfigError("warm-up window count must be non-negative");
}

namespace {

enum class Mode { Pure, Sharing, Concurrent };

/// Per (scenario, policy) constants shared read-only by all trials.
class Link {
public:
    Link(const Scenario& sc, const PolicySpec& policy)
        : sc_(sc), policy_(policy), n_(sc.params.antennas), grid_(sc.grid()) {
        sc.validate(policy);
        mode_ = std::holds_alternative<PureComm>(policy)      ? Mode::Pure
                : std::holds_alternative<TimeSharing>(policy) ? Mode::Sharing
                                                              : Mode::Concurrent;
        // Beam 0 is the user beam, beams 1..N the codebook sectors.
        beams_.resize(static_cast<size_t>(n_) + 1);
        snr_.assign(beams_.size(), 0.0);
        const auto& user = sc.geometry.user;
        if (mode_ != Mode::Concurrent) {
            beams_[0] = precoder_for_slot(policy, SlotKind::data(), user, {}, sc.params, sc.normalization);
            snr_[0] = comm_snr(beams_[0].f, beams_[0].energy, user, sc.params.noise_psd);
        }
        for (int k = 1; k <= n_; ++k) {
            if (mode_ == Mode::Sharing) {
                beams_[k] = precoder_for_slot(policy, SlotKind::pilot(k), user, {}, sc.params, sc.normalization);
            } else if (mode_ == Mode::Concurrent) {
                beams_[k] = precoder_for_slot(policy, SlotKind::data(), user, SweepState{k}, sc.params,
                                              sc.normalization);
                snr_[k] = comm_snr(beams_[k].f, beams_[k].energy, user, sc.params.noise_psd);
            }
        }
        if (mode_ == Mode::Sharing) pilots_ = leading_pilot_positions(n_);
    }

    const AngleGrid& grid() const { return grid_; }
    const Scenario& scenario() const { return sc_; }

    Schedule schedule(const WindowInput& in, Rng& rng) const {
        const auto& p = sc_.params;
        const auto arrivals =
            generate_arrivals(p.packet_rate_hz, p.sensing_window_s, p.symbols_per_packet(), rng, in.start_time);
        return build_schedule(arrivals, in.buffer, in.start_time, p.slots_per_window(), p.bandwidth_hz, pilots_, n_);
    }

    /// Beam used by a non-idle slot; advances the concurrent sweep on data slots.
    int beam_for(SlotKind kind, SweepState& sweep) const {
        if (kind.type == SlotType::Pilot) return kind.sector;
        if (mode_ != Mode::Concurrent) return 0;
        const int b = sweep.next_sector;
        sweep.next_sector = sweep.next_sector % n_ + 1;
        return b;
    }

    double energy_of(int beam) const { return beams_[beam].energy; }

    WindowOutcome run(std::span<const TargetEcho> echoes, const WindowInput& in, Rng& rng, bool sense) const {
        Schedule sched = schedule(in, rng);
        WindowOutcome out;
        out.sweep = in.sweep;
        WindowResult& r = out.result;
        r.hits.assign(echoes.size(), false);
        r.data_slots = sched.data_slots;
        r.pilot_slots = sched.pilot_slots;

        if (!sense) {
            for (const auto& kind : sched.slots) {
                if (kind.type == SlotType::Idle) continue;
                r.energy += energy_of(beam_for(kind, out.sweep));
            }
            out.buffer = std::move(sched.buffer);
            return out;
        }

        const auto& p = sc_.params;
        const double n0 = p.noise_psd;
        // a_k^T f_b for every beam and target.
        std::vector<cplx> resp(beams_.size() * echoes.size());
        for (size_t b = 0; b < beams_.size(); ++b) {
            if (beams_[b].f.empty()) continue;
            for (size_t k = 0; k < echoes.size(); ++k) resp[b * echoes.size() + k] = dot_t(echoes[k].steering, beams_[b].f);
        }

        CoherentIntegrator with_targets(n_), without_targets(n_);
        ComplexVec noise(static_cast<size_t>(n_)), y(static_cast<size_t>(n_));
        r.snr.reserve(static_cast<size_t>(sched.data_slots));

        for (const auto& kind : sched.slots) {
            if (kind.type == SlotType::Idle) continue;
            const int b = beam_for(kind, out.sweep);
            const SlotPrecoder& beam = beams_[b];
            const cplx symbol = kind.type == SlotType::Pilot ? cplx{1.0, 0.0} : draw_psk_symbol(p.modulation_order, rng);
            const cplx amp = std::sqrt(beam.energy) * symbol;

            for (auto& v : noise) v = rng.complex_normal(n0);
            y = noise;
            for (size_t k = 0; k < echoes.size(); ++k) {
                const cplx c = echoes[k].gain * amp * resp[b * echoes.size() + k];
                for (int i = 0; i < n_; ++i) y[i] += c * echoes[k].steering[i];
            }
            with_targets.add_beam(b, beam.f, amp, y);
            without_targets.add_beam(b, beam.f, amp, noise);

            r.energy += beam.energy;
            if (kind.type == SlotType::Data) r.snr.push_back(snr_[b]);
        }
        r.observations = with_targets.observations();

        // No observation means nothing to integrate: scored as a miss without detection.
        if (r.observations > 0) {
            const CfarSettings cfar{sc_.detector.training_cells, sc_.detector.guard_cells, p.p_fa};
            std::vector<double> angles;
            for (const auto& e : echoes) angles.push_back(e.theta);

            GlrtMap h1 = with_targets.map(grid_);
            apply_cfar(h1, cfar);
            const MatchResult m = match(detect(h1, grid_, in.index), angles, sc_.detector.hit_tolerance);
            r.hits = m.hit;
            r.false_detections = m.false_detections;

            GlrtMap h0 = without_targets.map(grid_);
            apply_cfar(h0, cfar);
            r.h0_detections = static_cast<int>(detect(h0, grid_, in.index).detections.size());
            if (in.keep_maps) {
                r.h1_map = std::move(h1);
                r.h0_map = std::move(h0);
            }
        }
        out.buffer = std::move(sched.buffer);
        return out;
    }

private:
    const Scenario& sc_;
    PolicySpec policy_;
    Mode mode_ = Mode::Pure;
    int n_;
    AngleGrid grid_;
    std::vector<SlotPrecoder> beams_;
    std::vector<double> snr_;
    std::vector<long> pilots_;
};

struct TrialSummary {
    std::vector<char> hits;
    bool h0_alarm = false;
    int observations = 0;
    int false_detections = 0;
    double snr_sum = 0.0;
    long snr_count = 0;
};

template <class Fn>
void parallel_for(long count, int workers, Fn&& fn) {
    if (workers <= 0) workers = default_workers();
    workers = static_cast<int>(std::min<long>(workers, count));
    if (workers <= 1) {
        for (long i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<long> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    pool.reserve(static_cast<size_t>(workers));
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (long i = next++; i < count; i = next++) {
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard lock(error_mutex);
                    if (!error) error = std::current_exception();
                    next = count;
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

}  // namespace

WindowOutcome run_window(const Scenario& scenario, const PolicySpec& policy, std::span<const TargetEcho> echoes,
                         const WindowInput& in, Rng& rng, bool sense) {
    const Link link(scenario, policy);
    return link.run(echoes, in, rng, sense);
}

MonteCarloResult monte_carlo(const Scenario& scenario, const PolicySpec& policy, long n_trials, std::uint64_t seed,
                             int workers) {
    if (n_trials < 1) throw ConfigError("trial count must be >= 1");
    const Link link(scenario, policy);
    const auto& p = scenario.params;
    const double window_s = static_cast<double>(p.slots_per_window()) / p.bandwidth_hz;
    const size_t targets = scenario.geometry.targets.size();

    std::vector<TrialSummary> trials(static_cast<size_t>(n_trials));
    parallel_for(n_trials, workers, [&](long t) {
        Rng rng(seed, static_cast<std::uint64_t>(t));
        const auto echoes = draw_target_echoes(scenario.geometry.targets, p.antennas, rng);
        WindowInput in;
        for (int w = 0; w < scenario.warmup_windows; ++w) {
            WindowOutcome o = link.run(echoes, in, rng, false);
            in.buffer = std::move(o.buffer);
            in.sweep = o.sweep;
            in.start_time += window_s;
            ++in.index;
        }
        const WindowOutcome o = link.run(echoes, in, rng, true);
        TrialSummary& s = trials[static_cast<size_t>(t)];
        s.hits.assign(o.result.hits.begin(), o.result.hits.end());
        s.h0_alarm = o.result.h0_detections > 0;
        s.observations = o.result.observations;
        s.false_detections = o.result.false_detections;
        for (double v : o.result.snr) s.snr_sum += v;
        s.snr_count = static_cast<long>(o.result.snr.size());
    });

    MonteCarloResult res;
    res.n_trials = n_trials;
    res.seed = seed;
    res.p_d_per_target.assign(targets, 0.0);
    long alarms = 0;
    double obs = 0.0, false_det = 0.0, snr_sum = 0.0;
    for (const auto& s : trials) {
        for (size_t k = 0; k < targets; ++k) res.p_d_per_target[k] += s.hits[k] ? 1.0 : 0.0;
        alarms += s.h0_alarm ? 1 : 0;
        obs += s.observations;
        false_det += s.false_detections;
        snr_sum += s.snr_sum;
        res.snr_samples += s.snr_count;
    }
    const auto nt = static_cast<double>(n_trials);
    for (auto& v : res.p_d_per_target) v /= nt;
    res.p_d = targets == 0 ? std::numeric_limits<double>::quiet_NaN()
                           : [&] {
                                 double acc = 0.0;
                                 for (double v : res.p_d_per_target) acc += v;
                                 return acc / static_cast<double>(targets);
                             }();
    res.p_fa_window = static_cast<double>(alarms) / nt;
    res.mean_observations = obs / nt;
    res.mean_false_detections = false_det / nt;
    if (res.snr_samples > 0) {
        res.mean_snr_linear = snr_sum / static_cast<double>(res.snr_samples);
        res.mean_snr_db = linear_to_db(res.mean_snr_linear);
    } else {
        res.mean_snr_linear = std::numeric_limits<double>::quiet_NaN();
        res.mean_snr_db = std::numeric_limits<double>::quiet_NaN();
    }
    return res;
}

PowerAudit audit_power(const Scenario& scenario, const PolicySpec& policy, double horizon_s, std::uint64_t seed) {
    if (!(horizon_s > 0.0)) throw ConfigError("power audit horizon must be positive");
    const Link link(scenario, policy);
    const auto& p = scenario.params;
    const double window_s = static_cast<double>(p.slots_per_window()) / p.bandwidth_hz;
    const auto windows = static_cast<long>(std::ceil(horizon_s / window_s));

    // Separate stream from the Monte Carlo trials of the same seed.
    Rng rng(seed, 0xa0d17ull << 40);
    WindowInput in;
    PowerAudit a;
    double energy = 0.0;
    for (long w = 0; w < windows; ++w) {
        Schedule sched = link.schedule(in, rng);
        a.packets += sched.completed_packets;
        for (const auto& kind : sched.slots)
            if (kind.type != SlotType::Idle) energy += link.energy_of(link.beam_for(kind, in.sweep));
        in.buffer = std::move(sched.buffer);
        in.start_time += window_s;
        ++in.index;
    }
    a.windows = windows;
    a.realized_w = energy / (static_cast<double>(windows) * window_s);
    a.target_w = p.transmit_power_w;
    a.relative_error = (a.realized_w - a.target_w) / a.target_w;
    return a;
}

// ---------------------------------------------------------------------------

namespace {

SweepRow run_point(const Scenario& sc, const PolicySpec& policy, double value, const SweepOptions& opt,
                   const PowerAudit* cached_audit) {
    SweepRow row;
    row.value = value;
    row.policy = policy;
    row.mc = monte_carlo(sc, policy, opt.n_trials, opt.seed, opt.workers);
    if (cached_audit) {
        row.power = *cached_audit;
    } else if (opt.audit_horizon_s > 0.0) {
        row.power = audit_power(sc, policy, opt.audit_horizon_s, opt.seed);
    }
    return row;
}

Scenario with_rcs(Scenario sc, double rcs_dbsm) {
    const double lambda = sc.params.wavelength();
    for (auto& t : sc.geometry.targets) t = TargetGeometry::make(t.theta, t.distance, db_to_linear(rcs_dbsm), lambda);
    return sc;
}

}  // namespace

std::vector<SweepResult> sweep_rcs(const Scenario& tmpl, const std::vector<PolicySpec>& policies,
                                   const std::vector<double>& rcs_dbsm, const SweepOptions& opt) {
    for (const auto& pol : policies) tmpl.validate(pol);
    std::vector<SweepResult> out;
    for (const auto& pol : policies) {
        SweepResult sr{"rcs_dbsm", pol, {}, opt.n_trials, opt.seed};
        // The radiated power does not depend on the target, so one audit serves the whole sweep.
        PowerAudit audit;
        if (opt.audit_horizon_s > 0.0) audit = audit_power(tmpl, pol, opt.audit_horizon_s, opt.seed);
        for (double v : rcs_dbsm) {
            const Scenario sc = with_rcs(tmpl, v);
            sr.rows.push_back(run_point(sc, pol, v, opt, opt.audit_horizon_s > 0.0 ? &audit : nullptr));
        }
        out.push_back(std::move(sr));
    }
    return out;
}

std::vector<SweepResult> sweep_ts(const Scenario& tmpl, const std::vector<PolicySpec>& policies,
                                  const std::vector<double>& ts_s, const SweepOptions& opt) {
    for (const auto& pol : policies)
        for (double ts : ts_s) {
            Scenario sc = tmpl;
            sc.params.sensing_window_s = ts;
            sc.validate(pol);
        }
    std::vector<SweepResult> out;
    for (const auto& pol : policies) {
        SweepResult sr{"ts_ms", pol, {}, opt.n_trials, opt.seed};
        for (double ts : ts_s) {
            Scenario sc = tmpl;
            sc.params.sensing_window_s = ts;
            sr.rows.push_back(run_point(sc, pol, ts * 1e3, opt, nullptr));
        }
        out.push_back(std::move(sr));
    }
    return out;
}

TradeoffResult tradeoff_curve(const Scenario& tmpl, const std::vector<double>& rho, const std::vector<double>& beta,
                              const SweepOptions& opt) {
    tmpl.validate(PureComm{});
    for (double r : rho) tmpl.validate(Concurrent{r});
    for (double b : beta) tmpl.validate(TimeSharing{b});

    TradeoffResult out;
    out.pure_comm = {"none", PureComm{}, {run_point(tmpl, PureComm{}, 0.0, opt, nullptr)}, opt.n_trials, opt.seed};
    out.concurrent = {"rho", Concurrent{}, {}, opt.n_trials, opt.seed};
    for (double r : rho) out.concurrent.rows.push_back(run_point(tmpl, Concurrent{r}, r, opt, nullptr));
    out.time_sharing = {"beta", TimeSharing{}, {}, opt.n_trials, opt.seed};
    for (double b : beta) out.time_sharing.rows.push_back(run_point(tmpl, TimeSharing{b}, b, opt, nullptr));
    return out;
}

int default_workers() {
    if (const char* env = std::getenv("ISACSIM_WORKERS")) {
        const int w = std::atoi(env);
        if (w > 0) return w;
    }
    const unsigned hc = std::thread::hardware_concurrency();
    return hc == 0 ? 1 : static_cast<int>(hc);
}

std::vector<double> default_rcs_grid_dbsm() {
    std::vector<double> g;
    for (int i = 0; i <= 16; ++i) g.push_back(-30.0 + 2.5 * i);
    return g;
}

std::vector<double> default_ts_grid_s() {
    return {0.2e-3, 0.3e-3, 0.5e-3, 1e-3, 2e-3, 3e-3, 4e-3, 5e-3, 6e-3};
}

std::vector<double> default_rho_grid() {
    std::vector<double> g;
    for (int i = 0; i <= 10; ++i) g.push_back(0.1 * i);
    return g;
}

std::vector<double> default_beta_grid() { return {0.0, 0.1, 0.5, 1.0, 2.0, 5.0, 10.0, 20.0, 50.0, 100.0, 200.0}; }

}  // namespace isac

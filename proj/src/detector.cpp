// SPDX-License-Identifier: Apache-2.0
#include "isac/detector.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <tuple>

namespace isac {

AngleGrid AngleGrid::uniform(double lo, double hi, double step) {
    if (!(step > 0.0) || !(hi > lo)) throw ConfigError("angle grid needs hi > lo and a positive step");
    const auto cells = static_cast<size_t>(std::floor((hi - lo) / step + 1e-9)) + 1;
    AngleGrid g;
    g.angles.resize(cells);
    for (size_t i = 0; i < cells; ++i) g.angles[i] = lo + static_cast<double>(i) * step;
    return g;
}

// ---------------------------------------------------------------------------

CoherentIntegrator::CoherentIntegrator(int antennas)
    : n_(antennas), dense_c_(static_cast<size_t>(antennas * antennas)), dense_g_(dense_c_.size()) {}

void CoherentIntegrator::add(std::span<const cplx> y, std::span<const cplx> s) {
    for (int i = 0; i < n_; ++i) {
        const cplx yi = std::conj(y[i]);
        const cplx si = s[i];
        for (int j = 0; j < n_; ++j) {
            dense_c_[i * n_ + j] += yi * s[j];
            dense_g_[i * n_ + j] += si * std::conj(s[j]);
        }
    }
    ++count_;
}

void CoherentIntegrator::add_beam(int beam, std::span<const cplx> f, cplx amplitude, std::span<const cplx> y) {
    if (beam < 0) throw std::invalid_argument("beam id must be non-negative");
    if (static_cast<size_t>(beam) >= beams_.size()) beams_.resize(static_cast<size_t>(beam) + 1);
    Beam& b = beams_[beam];
    if (b.f.empty()) {
        b.f.assign(f.begin(), f.end());
        b.v.assign(static_cast<size_t>(n_), cplx{});
    }
    for (int i = 0; i < n_; ++i) b.v[i] += amplitude * std::conj(y[i]);
    b.energy += std::norm(amplitude);
    ++count_;
}

CoherentIntegrator::Poly CoherentIntegrator::fold() const {
    const int n = n_;
    Poly p;
    p.c.assign(static_cast<size_t>(2 * n - 1), cplx{});
    p.g.assign(static_cast<size_t>(n), cplx{});
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            p.c[i + j] += dense_c_[i * n + j];
            if (i >= j) p.g[i - j] += dense_g_[i * n + j];
        }
        p.trace += dense_g_[i * n + i].real();
    }
    for (const auto& b : beams_) {
        if (b.f.empty()) continue;
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < n; ++j) {
                p.c[i + j] += b.v[i] * b.f[j];
                if (i >= j) p.g[i - j] += b.energy * b.f[i] * std::conj(b.f[j]);
            }
        }
        p.trace += b.energy * norm_sq(b.f);
    }
    return p;
}

void CoherentIntegrator::evaluate(const Poly& p, int n, double theta, cplx& num, double& den, bool& usable) {
    const cplx z = std::polar(1.0, kPi * std::sin(theta));
    num = cplx{};
    for (auto k = p.c.size(); k-- > 0;) num = num * z + p.c[k];
    cplx lagged{};
    for (auto d = p.g.size(); d-- > 1;) lagged = (lagged + p.g[d]) * z;
    den = n * (p.g[0].real() + 2.0 * lagged.real());
    usable = den > 1e-12 * n * n * p.trace;
}

GlrtMap CoherentIntegrator::map(const AngleGrid& grid) const {
    GlrtMap m;
    m.observations = count_;
    if (count_ == 0) return m;
    const Poly p = fold();
    m.chi.resize(grid.size());
    m.alpha_hat.resize(grid.size());
    m.usable.resize(grid.size());
    for (size_t i = 0; i < grid.size(); ++i) {
        cplx num;
        double den;
        bool ok;
        evaluate(p, n_, grid.angles[i], num, den, ok);
        m.usable[i] = ok;
        if (ok) {
            m.chi[i] = std::norm(num) / den;
            m.alpha_hat[i] = std::conj(num) / den;
        }
    }
    return m;
}

cplx CoherentIntegrator::estimate_gain(double theta) const {
    if (count_ == 0) throw UndefinedGainError("no observations to estimate a gain from");
    cplx num;
    double den;
    bool ok;
    evaluate(fold(), n_, theta, num, den, ok);
    if (!ok) throw UndefinedGainError("no observation illuminates the requested direction");
    return std::conj(num) / den;
}

GlrtMap glrt_map(std::span<const SensingObservation> obs, const AngleGrid& grid) {
    if (obs.empty()) return {};
    CoherentIntegrator acc(static_cast<int>(obs.front().y.size()));
    for (const auto& o : obs) {
        if (o.y.size() != obs.front().y.size() || o.s.size() != o.y.size())
            throw std::invalid_argument("observations must share one antenna count");
        acc.add(o.y, o.s);
    }
    return acc.map(grid);
}

cplx estimate_gain(std::span<const SensingObservation> obs, double theta) {
    if (obs.empty()) throw UndefinedGainError("no observations to estimate a gain from");
    CoherentIntegrator acc(static_cast<int>(obs.front().y.size()));
    for (const auto& o : obs) acc.add(o.y, o.s);
    return acc.estimate_gain(theta);
}

// ---------------------------------------------------------------------------

std::vector<double> cfar_thresholds(std::span<const double> chi, double p_fa, int training, int guard,
                                    const std::vector<bool>& usable) {
    const auto len = static_cast<long>(chi.size());
    if (training < 2 || training % 2 != 0) throw ConfigError("CFAR training cells must be a positive even count");
    if (guard < 0) throw ConfigError("CFAR guard cells must be non-negative");
    if (len <= training + 2L * guard + 1)
        throw ConfigError("angle grid too short for CFAR: need more than N_c + 2 N_g + 1 = " +
                          std::to_string(training + 2 * guard + 1) + " cells");
    if (!(p_fa > 0.0 && p_fa < 1.0)) throw ConfigError("P_fa must lie in (0, 1)");

    auto ok = [&](long i) { return usable.empty() || usable[static_cast<size_t>(i)]; };
    std::vector<double> out(chi.size());
    std::vector<long> left, right;
    for (long cut = 0; cut < len; ++cut) {
        left.clear();
        right.clear();
        for (long i = cut - guard - 1; i >= 0 && static_cast<int>(left.size()) < training; --i)
            if (ok(i)) left.push_back(i);
        for (long i = cut + guard + 1; i < len && static_cast<int>(right.size()) < training; ++i)
            if (ok(i)) right.push_back(i);

        size_t take_l = std::min<size_t>(training / 2, left.size());
        size_t take_r = std::min<size_t>(training - take_l, right.size());
        take_l = std::min<size_t>(training - take_r, left.size());

        const size_t used = take_l + take_r;
        if (used == 0) {
            out[cut] = std::numeric_limits<double>::infinity();
            continue;
        }
        double sum = 0.0;
        for (size_t k = 0; k < take_l; ++k) sum += chi[left[k]];
        for (size_t k = 0; k < take_r; ++k) sum += chi[right[k]];
        out[cut] = cfar_multiplier(p_fa, static_cast<int>(used)) * sum;
    }
    return out;
}

void apply_cfar(GlrtMap& map, const CfarSettings& cfar) {
    if (map.empty()) return;
    map.threshold = cfar_thresholds(map.chi, cfar.p_fa, cfar.training_cells, cfar.guard_cells, map.usable);
}

DetectionReport detect(const GlrtMap& map, const AngleGrid& grid, long window) {
    DetectionReport rep;
    rep.observations = map.observations;
    rep.window = window;
    if (map.empty()) return rep;
    if (map.threshold.size() != map.chi.size()) throw std::logic_error("detect() called before CFAR thresholds");

    const auto& chi = map.chi;
    const size_t len = chi.size();
    size_t i = 0;
    while (i < len) {
        size_t j = i;
        while (j + 1 < len && chi[j + 1] == chi[i]) ++j;
        const bool above_left = i == 0 || chi[i - 1] < chi[i];
        const bool above_right = j + 1 == len || chi[j + 1] < chi[i];
        if (above_left && above_right && map.usable[i] && chi[i] > map.threshold[i])
            rep.detections.push_back({grid.angles[i], map.alpha_hat[i], chi[i], i});
        i = j + 1;
    }
    return rep;
}

MatchResult match(const DetectionReport& report, std::span<const double> target_angles, double tol) {
    if (!(tol > 0.0)) throw ConfigError("hit tolerance must be positive");
    MatchResult res;
    res.hit.assign(target_angles.size(), false);

    std::vector<std::tuple<double, size_t, size_t>> pairs;
    for (size_t d = 0; d < report.detections.size(); ++d)
        for (size_t k = 0; k < target_angles.size(); ++k) {
            const double dist = std::abs(report.detections[d].theta - target_angles[k]);
            if (dist <= tol) pairs.emplace_back(dist, d, k);
        }
    std::sort(pairs.begin(), pairs.end());

    std::vector<bool> used(report.detections.size(), false);
    for (const auto& [dist, d, k] : pairs) {
        if (used[d] || res.hit[k]) continue;
        used[d] = true;
        res.hit[k] = true;
    }
    res.false_detections = static_cast<int>(std::count(used.begin(), used.end(), false));
    return res;
}

}  // namespace isac

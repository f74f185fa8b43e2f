#include <doctest.h>

#include <cmath>

#include "isac/channel.hpp"
#include "isac/detector.hpp"
#include "isac/rng.hpp"

using namespace isac;

namespace {

// Least-squares oracle written against the signal model y_m = alpha h_m + n with h_m = a a^T s_m:
// alpha_hat = sum h^H y / sum ||h||^2 and chi = |sum h^H y|^2 / sum ||h||^2.
void oracle(const std::vector<SensingObservation>& obs, double theta, double& chi, cplx& alpha) {
    const int n = static_cast<int>(obs.front().y.size());
    const auto a = steering_vector(theta, n);
    cplx corr{};
    double energy = 0.0;
    for (const auto& o : obs) {
        cplx as{};
        for (int i = 0; i < n; ++i) as += a[i] * o.s[i];
        for (int i = 0; i < n; ++i) {
            const cplx h = a[i] * as;
            corr += std::conj(h) * o.y[i];
            energy += std::norm(h);
        }
    }
    chi = std::norm(corr) / energy;
    alpha = corr / energy;
}

std::vector<SensingObservation> random_obs(int n, int m, Rng& rng) {
    std::vector<SensingObservation> obs;
    for (int k = 0; k < m; ++k) {
        SensingObservation o;
        o.y.resize(n);
        o.s.resize(n);
        for (auto& x : o.y) x = rng.complex_normal(1.0);
        for (auto& x : o.s) x = rng.complex_normal(1.0);
        obs.push_back(std::move(o));
    }
    return obs;
}

}  // namespace

TEST_CASE("GLRT map matches the brute-force least-squares oracle on a 5-cell grid") {
    Rng rng(31);
    for (int n : {2, 5, 16}) {
        const auto obs = random_obs(n, 7, rng);
        const AngleGrid grid{{-1.0, -0.4, 0.0, 0.35, 1.2}};
        const auto map = glrt_map(obs, grid);
        CHECK(map.observations == 7);
        for (size_t i = 0; i < grid.size(); ++i) {
            double chi;
            cplx alpha;
            oracle(obs, grid.angles[i], chi, alpha);
            CHECK(map.usable[i]);
            CHECK(map.chi[i] == doctest::Approx(chi).epsilon(1e-9));
            CHECK(std::abs(map.alpha_hat[i] - alpha) <= 1e-9 * std::abs(alpha));
            CHECK(std::abs(estimate_gain(obs, grid.angles[i]) - alpha) <= 1e-9 * std::abs(alpha));
        }
    }
}

TEST_CASE("beam-folded accumulation equals the dense update") {
    Rng rng(32);
    const int n = 16;
    CoherentIntegrator dense(n), folded(n);
    std::vector<ComplexVec> beams;
    for (int b = 0; b < 3; ++b) {
        ComplexVec f(n);
        for (auto& x : f) x = rng.complex_normal(1.0);
        beams.push_back(f);
    }
    for (int m = 0; m < 50; ++m) {
        const int b = m % 3;
        const cplx amp = rng.complex_normal(1.0);
        ComplexVec y(n), s(n);
        for (auto& x : y) x = rng.complex_normal(1.0);
        for (int i = 0; i < n; ++i) s[i] = amp * beams[b][i];
        dense.add(y, s);
        folded.add_beam(b, beams[b], amp, y);
    }
    // Mixing both paths in one integrator is also allowed.
    ComplexVec y(n), s(n);
    for (auto& x : y) x = rng.complex_normal(1.0);
    for (auto& x : s) x = rng.complex_normal(1.0);
    dense.add(y, s);
    folded.add(y, s);

    const auto grid = AngleGrid::uniform(-1.2, 1.2, 0.01);
    const auto a = dense.map(grid), b = folded.map(grid);
    CHECK(a.observations == 51);
    CHECK(b.observations == 51);
    for (size_t i = 0; i < grid.size(); ++i) CHECK(a.chi[i] == doctest::Approx(b.chi[i]).epsilon(1e-9));
}

TEST_CASE("noise-free boresight fixture") {
    const int n = 16;
    const double es = 1e-7;
    const cplx alpha = std::polar(3e-7, 1.1);
    const TargetEcho echo{0.0, alpha, steering_vector(0.0, n)};
    ComplexVec f(n, cplx(1.0 / std::sqrt(16.0), 0.0));
    const auto s = transmit_vector(f, es, cplx(1.0, 0.0));
    Rng rng(0);
    const std::vector<TargetEcho> echoes{echo};
    const std::vector<SensingObservation> obs{sense(s, echoes, 0.0, rng)};
    const AngleGrid grid{{-0.1, 0.0, 0.1}};
    const auto map = glrt_map(obs, grid);
    CHECK(map.chi[1] == doctest::Approx(std::norm(alpha) * es * n * n).epsilon(1e-12));
    CHECK(std::abs(map.alpha_hat[1] - alpha) <= 1e-12 * std::abs(alpha));
    CHECK(map.chi[1] > map.chi[0]);
    CHECK(map.chi[1] > map.chi[2]);
}

TEST_CASE("empty observation set") {
    const auto map = glrt_map({}, AngleGrid::uniform(-1, 1, 0.1));
    CHECK(map.empty());
    const auto rep = detect(map, AngleGrid::uniform(-1, 1, 0.1));
    CHECK(rep.detections.empty());
    CHECK_THROWS_AS(estimate_gain({}, 0.0), UndefinedGainError);
}

TEST_CASE("unilluminated directions are masked") {
    // A single observation whose transmit vector is orthogonal to a(theta) in the a^T sense.
    const int n = 4;
    const double theta = 0.5;
    const auto a = steering_vector(theta, n);
    ComplexVec s{a[1], -a[0], 0.0, 0.0};  // a^T s = a0 a1 - a1 a0 = 0
    ComplexVec y(n, cplx(1.0, 0.0));
    const std::vector<SensingObservation> obs{{y, s, 0}};
    const auto map = glrt_map(obs, AngleGrid{{theta, 0.0}});
    CHECK_FALSE(map.usable[0]);
    CHECK(map.chi[0] == 0.0);
    CHECK(map.usable[1]);
    CHECK_THROWS_AS(estimate_gain(obs, theta), UndefinedGainError);
}

TEST_CASE("angle grid") {
    const auto g = AngleGrid::uniform(deg_to_rad(-70), deg_to_rad(70), deg_to_rad(0.5));
    CHECK(g.size() == 281);
    CHECK(g.angles.front() == doctest::Approx(deg_to_rad(-70)));
    CHECK(g.angles.back() == doctest::Approx(deg_to_rad(70)));
    CHECK_THROWS(AngleGrid::uniform(1, 0, 0.1));
}

TEST_CASE("CFAR multiplier") {
    CHECK(cfar_multiplier(1e-2, 16) == doctest::Approx(0.33352).epsilon(1e-4));
    CHECK(cfar_multiplier(1e-2, 16) == doctest::Approx(std::pow(100.0, 1.0 / 16.0) - 1.0));
    CHECK(fixed_threshold(2.0, 1e-2) == doctest::Approx(2.0 * std::log(100.0)));
}

TEST_CASE("CFAR training windows with guard cells and edge rebalancing") {
    std::vector<double> chi(12);
    for (int i = 0; i < 12; ++i) chi[i] = i + 1.0;
    const double m = std::pow(0.01, -0.25) - 1.0;
    const auto thr = cfar_thresholds(chi, 0.01, 4, 1, {});
    CHECK(thr[0] == doctest::Approx(m * (3 + 4 + 5 + 6)));    // all on the right
    CHECK(thr[5] == doctest::Approx(m * (4 + 3 + 8 + 9)));    // two each side
    CHECK(thr[11] == doctest::Approx(m * (10 + 9 + 8 + 7)));  // all on the left
    CHECK(thr[2] == doctest::Approx(m * (1 + 5 + 6 + 7)));    // one left, topped up on the right

    std::vector<bool> usable(12, true);
    usable[7] = false;
    const auto masked = cfar_thresholds(chi, 0.01, 4, 1, usable);
    CHECK(masked[5] == doctest::Approx(m * (4 + 3 + 9 + 10)));

    // Too few usable cells: multiplier follows the count actually used.
    std::vector<bool> sparse(12, false);
    sparse[0] = sparse[11] = true;
    const auto few = cfar_thresholds(chi, 0.01, 4, 1, sparse);
    CHECK(few[5] == doctest::Approx((std::pow(0.01, -0.5) - 1.0) * (1 + 12)));
    std::vector<bool> none(12, false);
    CHECK(std::isinf(cfar_thresholds(chi, 0.01, 4, 1, none)[3]));

    CHECK_THROWS_AS(cfar_thresholds(chi, 0.01, 4, 4, {}), ConfigError);   // 12 <= 4 + 8 + 1
    CHECK_THROWS_AS(cfar_thresholds(chi, 0.01, 3, 1, {}), ConfigError);
    CHECK_THROWS_AS(cfar_thresholds(chi, 1.5, 4, 1, {}), ConfigError);
}

TEST_CASE("CA-CFAR is exact for i.i.d. exponential cells") {
    // P(X > m * sum of Nc i.i.d. Exp) = (1 + m)^(-Nc) = P_fa.
    Rng rng(41);
    const int cells = 64;
    long decisions = 0, alarms = 0;
    for (int r = 0; r < 4000; ++r) {
        std::vector<double> chi(cells);
        for (auto& x : chi) x = rng.exponential(1.0) * 3.0;
        const auto thr = cfar_thresholds(chi, 1e-2, 16, 2, {});
        for (int i = 0; i < cells; ++i) {
            ++decisions;
            alarms += chi[i] > thr[i];
        }
    }
    const double rate = static_cast<double>(alarms) / decisions;
    CHECK(rate == doctest::Approx(1e-2).epsilon(0.08));
}

TEST_CASE("detection: local maxima above threshold, plateau reports leftmost") {
    GlrtMap map;
    map.chi = {1, 5, 2, 7, 7, 3, 9};
    map.usable.assign(7, true);
    map.alpha_hat.assign(7, cplx(1, 0));
    map.threshold.assign(7, 4.0);
    map.observations = 3;
    const AngleGrid grid{{0, 1, 2, 3, 4, 5, 6}};
    auto rep = detect(map, grid, 12);
    CHECK(rep.window == 12);
    CHECK(rep.observations == 3);
    REQUIRE(rep.detections.size() == 3);
    CHECK(rep.detections[0].cell == 1);
    CHECK(rep.detections[1].cell == 3);
    CHECK(rep.detections[2].cell == 6);  // edge cell counts as a maximum

    map.threshold[6] = 10.0;
    map.usable[1] = false;
    rep = detect(map, grid);
    REQUIRE(rep.detections.size() == 1);
    CHECK(rep.detections[0].theta == 3.0);

    GlrtMap no_thr = map;
    no_thr.threshold.clear();
    CHECK_THROWS_AS(detect(no_thr, grid), std::logic_error);
}

TEST_CASE("matching is nearest-first and one-to-one") {
    DetectionReport rep;
    rep.detections = {{0.10, {}, 1, 0}, {0.12, {}, 1, 1}, {0.50, {}, 1, 2}, {2.0, {}, 1, 3}};
    const std::vector<double> targets{0.11, 0.45, 1.0};
    const auto m = match(rep, targets, 0.06);
    CHECK(m.hit == std::vector<bool>{true, true, false});
    CHECK(m.false_detections == 2);

    // Contention: both targets prefer the same detection; nearest pair wins.
    DetectionReport one;
    one.detections = {{0.0, {}, 1, 0}};
    const std::vector<double> two{0.03, -0.01};
    const auto c = match(one, two, 0.05);
    CHECK(c.hit == std::vector<bool>{false, true});
    CHECK(c.false_detections == 0);
    CHECK_THROWS_AS(match(one, two, 0.0), ConfigError);
}

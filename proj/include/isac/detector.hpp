// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <span>
#include <stdexcept>
#include <vector>

#include "isac/channel.hpp"
#include "isac/core.hpp"

namespace isac {

/// Thrown when the gain estimate is requested in a direction no observation illuminates.
class UndefinedGainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Strictly increasing, uniformly spaced angles [rad].
struct AngleGrid {
    std::vector<double> angles;

    /// Covers [lo, hi] with spacing `step`; both endpoints included when hi - lo is a multiple of step.
    static AngleGrid uniform(double lo, double hi, double step);
    size_t size() const { return angles.size(); }
};

struct CfarSettings {
    int training_cells = 16;
    int guard_cells = 24;
    double p_fa = 1e-2;
};

struct GlrtMap {
    std::vector<double> chi;        // statistic per cell
    std::vector<cplx> alpha_hat;    // gain estimate per cell (0 where masked)
    std::vector<bool> usable;       // false where no observation illuminates the cell
    std::vector<double> threshold;  // CA-CFAR threshold per cell, empty until computed
    int observations = 0;

    bool empty() const { return observations == 0; }
};

/// Running sufficient statistics of a window's observations.
///
/// With C = sum_m conj(y_m) s_m^T and G = sum_m s_m s_m^H the statistic at angle theta is
/// chi = |a^T C a|^2 / (N a^T G a*) and the gain estimate is conj(a^T C a) / (N a^T G a*),
/// both polynomials in exp(j pi sin theta).
class CoherentIntegrator {
public:
    explicit CoherentIntegrator(int antennas);

    void add(std::span<const cplx> y, std::span<const cplx> s);

    /// Same as add(y, amplitude * f). Observations sharing a beam are folded before the
    /// O(N^2) update, so a window costs O(M N + beams N^2).
    void add_beam(int beam, std::span<const cplx> f, cplx amplitude, std::span<const cplx> y);

    int observations() const { return count_; }
    int antennas() const { return n_; }

    GlrtMap map(const AngleGrid& grid) const;
    cplx estimate_gain(double theta) const;

private:
    struct Beam {
        ComplexVec f;
        ComplexVec v;      // sum amplitude * conj(y)
        double energy = 0.0;
    };
    struct Poly {
        ComplexVec c;      // a^T C a coefficients, powers 0 .. 2N-2
        ComplexVec g;      // a^T G a* coefficients, lags 0 .. N-1
        double trace = 0.0;
    };

    Poly fold() const;
    static void evaluate(const Poly& p, int n, double theta, cplx& num, double& den, bool& usable);

    int n_;
    int count_ = 0;
    ComplexVec dense_c_;   // row-major N x N
    ComplexVec dense_g_;
    std::vector<Beam> beams_;
};

/// chi(theta) over the grid with coherent integration of all observations.
GlrtMap glrt_map(std::span<const SensingObservation> obs, const AngleGrid& grid);

/// Least-squares target gain at `theta`.
cplx estimate_gain(std::span<const SensingObservation> obs, double theta);

/// Cell-averaging CFAR thresholds (P_fa^(-1/Nc) - 1) * sum of training cells.
///
/// Training cells sit beyond `guard` cells on each side, Nc/2 per side, topped up from the
/// other side near the grid edges. Cells with `usable` false are skipped.
std::vector<double> cfar_thresholds(std::span<const double> chi, double p_fa, int training, int guard,
                                    const std::vector<bool>& usable = {});

inline double cfar_multiplier(double p_fa, int training) {
    return std::pow(p_fa, -1.0 / training) - 1.0;
}

/// Known-noise threshold N0 ln(1/P_fa), used only to check the statistic's null distribution.
inline double fixed_threshold(double n0, double p_fa) { return n0 * std::log(1.0 / p_fa); }

void apply_cfar(GlrtMap& map, const CfarSettings& cfar);

struct Detection {
    double theta = 0.0;
    cplx alpha_hat{};
    double chi = 0.0;
    size_t cell = 0;
};

struct DetectionReport {
    std::vector<Detection> detections;
    int observations = 0;
    long window = 0;
};

/// Local maxima of chi above threshold (plateaus report their leftmost cell).
DetectionReport detect(const GlrtMap& map, const AngleGrid& grid, long window = 0);

struct MatchResult {
    std::vector<bool> hit;   // per target
    int false_detections = 0;
};

/// Nearest-first greedy association of detections to targets within `tol`.
MatchResult match(const DetectionReport& report, std::span<const double> target_angles, double tol);

}  // namespace isac

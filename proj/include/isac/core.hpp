// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace isac {

using cplx = std::complex<double>;
using ComplexVec = std::vector<cplx>;

inline constexpr double kSpeedOfLight = 3e8;  // rounded, as in the usual link-budget tables
inline constexpr double kPi = std::numbers::pi;

/// Raised for any configuration or precondition violation that the caller can fix.
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// ---------------------------------------------------------------------------
// Unit helpers. Everything inside the library is linear SI.

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double linear_to_db(double x) { return 10.0 * std::log10(x); }
inline double dbm_to_watt(double dbm) { return db_to_linear(dbm - 30.0); }
inline double watt_to_dbm(double w) { return linear_to_db(w) + 30.0; }
inline double deg_to_rad(double deg) { return deg * kPi / 180.0; }
inline double rad_to_deg(double rad) { return rad * 180.0 / kPi; }

// ---------------------------------------------------------------------------

/// Physical and traffic constants of one simulated link.
struct SystemParams {
    double carrier_hz = 5e9;
    double transmit_power_w = 0.1;   // average, over all slots
    int antennas = 16;               // both transmit and sensing arrays
    double bandwidth_hz = 10e6;      // symbol rate
    double noise_psd = 3.981071705534972e-21;  // W/Hz, -174 dBm/Hz
    int packet_bits = 1000;
    double packet_rate_hz = 1000.0;
    int modulation_order = 2;
    double max_sweep_angle = 70.0 * kPi / 180.0;
    double sensing_window_s = 0.3e-3;
    double p_fa = 1e-2;              // per-cell CFAR false-alarm target

    double wavelength() const { return kSpeedOfLight / carrier_hz; }
    int bits_per_symbol() const;
    int symbols_per_packet() const;
    long slots_per_window() const;

    /// Throws ConfigError naming the first violated constraint.
    void validate() const;
};

struct UserGeometry {
    double theta = 0.0;
    double distance = 1.0;
    double gain_sq = 0.0;   // |alpha_u|^2

    static UserGeometry make(double theta, double distance, double wavelength);
};

struct TargetGeometry {
    double theta = 0.0;
    double distance = 1.0;
    double rcs = 1.0;       // m^2
    double gain_sq = 0.0;   // round-trip |alpha_t|^2

    static TargetGeometry make(double theta, double distance, double rcs, double wavelength);
};

/// ULA response with half-wavelength spacing: element n is exp(j*pi*n*sin(theta)).
ComplexVec steering_vector(double theta, int antennas);

/// Friis free-space power gain lambda^2 / (4 pi d)^2.
double comm_gain(double distance, double wavelength);

/// Monostatic radar-equation power gain sigma lambda^2 / ((4 pi)^3 d^4).
double radar_gain(double distance, double rcs, double wavelength);

/// Uniform sector direction, n in [1, count]; n = 1 is -theta_max and n = count is +theta_max.
double codebook_angle(int n, int count, double theta_max);

// Small linear-algebra helpers over ComplexVec.

/// a^T b (no conjugation).
cplx dot_t(std::span<const cplx> a, std::span<const cplx> b);
/// a^H b.
cplx dot_h(std::span<const cplx> a, std::span<const cplx> b);
double norm_sq(std::span<const cplx> v);
ComplexVec conj(std::span<const cplx> v);

}  // namespace isac

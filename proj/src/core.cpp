// SPDX-License-Identifier: Apache-2.0
#include "isac/core.hpp"

#include <bit>
#include <cmath>
#include <string>

namespace isac {

int SystemParams::bits_per_symbol() const {
    return std::countr_zero(static_cast<unsigned>(modulation_order));
}

int SystemParams::symbols_per_packet() const {
    const int bps = bits_per_symbol();
    return (packet_bits + bps - 1) / bps;
}

long SystemParams::slots_per_window() const {
    // T_s * W is often an integer that floating point lands just below.
    return static_cast<long>(std::floor(sensing_window_s * bandwidth_hz + 1e-6));
}

void SystemParams::validate() const {
    auto fail = [](const std::string& what) { throw ConfigError(what); };
    if (!(carrier_hz > 0.0)) fail("carrier frequency must be positive");
    if (!(transmit_power_w > 0.0)) fail("transmit power P_T must be positive");
    if (antennas < 2) fail("antenna count N must be >= 2");
    if (!(bandwidth_hz > 0.0)) fail("bandwidth W must be positive");
    if (!(noise_psd >= 0.0)) fail("noise PSD N0 must be non-negative");
    if (packet_bits < 1) fail("packet length B must be >= 1 bit");
    if (!(packet_rate_hz >= 0.0)) fail("packet rate lambda_u must be non-negative");
    if (modulation_order < 2 || !std::has_single_bit(static_cast<unsigned>(modulation_order)))
        fail("modulation order Q must be a power of two >= 2");
    if (!(max_sweep_angle > 0.0 && max_sweep_angle <= kPi / 2.0 + 1e-12))
        fail("theta_max must lie in (0, 90] degrees");
    if (!(sensing_window_s > 0.0)) fail("sensing window T_s must be positive");
    if (slots_per_window() < 1) fail("sensing window T_s must span at least one symbol slot");
    if (!(p_fa > 0.0 && p_fa < 1.0)) fail("P_fa must lie in (0, 1)");

    const double offered = packet_bits * packet_rate_hz;
    const double capacity = bandwidth_hz * bits_per_symbol();
    if (!(offered < capacity)) {
        fail("bursty-traffic condition violated: B*lambda_u = " + std::to_string(offered) +
             " bit/s must be < W*log2(Q) = " + std::to_string(capacity) + " bit/s");
    }
}

UserGeometry UserGeometry::make(double theta, double distance, double wavelength) {
    return {theta, distance, comm_gain(distance, wavelength)};
}

TargetGeometry TargetGeometry::make(double theta, double distance, double rcs, double wavelength) {
    return {theta, distance, rcs, radar_gain(distance, rcs, wavelength)};
}

ComplexVec steering_vector(double theta, int antennas) {
    ComplexVec a(static_cast<size_t>(antennas));
    const double phase = kPi * std::sin(theta);
    for (int n = 0; n < antennas; ++n) a[n] = std::polar(1.0, phase * n);
    return a;
}

double comm_gain(double distance, double wavelength) {
    if (!(distance > 0.0)) throw ConfigError("user distance must be positive");
    const double r = wavelength / (4.0 * kPi * distance);
    return r * r;
}

double radar_gain(double distance, double rcs, double wavelength) {
    if (!(distance > 0.0)) throw ConfigError("target distance must be positive");
    if (!(rcs > 0.0)) throw ConfigError("target RCS must be positive");
    const double four_pi = 4.0 * kPi;
    const double d2 = distance * distance;
    return rcs * wavelength * wavelength / (four_pi * four_pi * four_pi * d2 * d2);
}

double codebook_angle(int n, int count, double theta_max) {
    if (count < 2) throw ConfigError("codebook needs at least two sectors");
    if (n < 1 || n > count)
        throw ConfigError("codebook index " + std::to_string(n) + " outside 1.." + std::to_string(count));
    return -theta_max + 2.0 * (n - 1) * theta_max / (count - 1);
}

cplx dot_t(std::span<const cplx> a, std::span<const cplx> b) {
    cplx acc{};
    for (size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
    return acc;
}

cplx dot_h(std::span<const cplx> a, std::span<const cplx> b) {
    cplx acc{};
    for (size_t i = 0; i < a.size(); ++i) acc += std::conj(a[i]) * b[i];
    return acc;
}

double norm_sq(std::span<const cplx> v) {
    double acc = 0.0;
    for (const auto& x : v) acc += std::norm(x);
    return acc;
}

ComplexVec conj(std::span<const cplx> v) {
    ComplexVec out(v.size());
    for (size_t i = 0; i < v.size(); ++i) out[i] = std::conj(v[i]);
    return out;
}

}  // namespace isac

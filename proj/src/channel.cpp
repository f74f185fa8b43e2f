// SPDX-License-Identifier: Apache-2.0
#include "isac/channel.hpp"

#include <cmath>

namespace isac {

std::vector<TargetEcho> draw_target_echoes(std::span<const TargetGeometry> targets, int antennas, Rng& rng) {
    std::vector<TargetEcho> out;
    out.reserve(targets.size());
    for (const auto& t : targets) out.push_back(make_echo(t, antennas, 2.0 * kPi * rng.uniform()));
    return out;
}

TargetEcho make_echo(const TargetGeometry& target, int antennas, double phase) {
    return {target.theta, std::polar(std::sqrt(target.gain_sq), phase), steering_vector(target.theta, antennas)};
}

ComplexVec transmit_vector(std::span<const cplx> f, double energy, cplx symbol) {
    const cplx scale = std::sqrt(energy) * symbol;
    ComplexVec s(f.size());
    for (size_t i = 0; i < f.size(); ++i) s[i] = scale * f[i];
    return s;
}

ComplexVec echo_response(std::span<const cplx> s, std::span<const TargetEcho> echoes) {
    ComplexVec y(s.size());
    for (const auto& e : echoes) {
        const cplx c = e.gain * dot_t(e.steering, s);
        for (size_t i = 0; i < y.size(); ++i) y[i] += c * e.steering[i];
    }
    return y;
}

void add_noise(ComplexVec& y, double n0, Rng& rng) {
    if (n0 == 0.0) return;
    for (auto& v : y) v += rng.complex_normal(n0);
}

SensingObservation sense(std::span<const cplx> s, std::span<const TargetEcho> echoes, double n0, Rng& rng,
                         long slot) {
    SensingObservation obs{echo_response(s, echoes), ComplexVec(s.begin(), s.end()), slot};
    add_noise(obs.y, n0, rng);
    return obs;
}

double comm_snr(std::span<const cplx> f, double symbol_energy, const UserGeometry& user, double n0) {
    const ComplexVec a = steering_vector(user.theta, static_cast<int>(f.size()));
    return symbol_energy * user.gain_sq * std::norm(dot_t(a, f)) / n0;
}

cplx draw_psk_symbol(int modulation_order, Rng& rng) {
    if (modulation_order == 2) return rng.uniform() < 0.5 ? cplx{1.0, 0.0} : cplx{-1.0, 0.0};
    const int k = rng.uniform_int(0, modulation_order - 1);
    return std::polar(1.0, 2.0 * kPi * k / modulation_order);
}

}  // namespace isac

// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <span>
#include <vector>

#include "isac/core.hpp"
#include "isac/rng.hpp"

namespace isac {

struct ScenarioGeometry {
    UserGeometry user;
    std::vector<TargetGeometry> targets;
};

/// A backscatter snapshot and the transmit vector that produced it.
struct SensingObservation {
    ComplexVec y;
    ComplexVec s;
    long slot = 0;
};

/// A target as seen by the array during one trial: complex round-trip gain and steering vector.
struct TargetEcho {
    double theta = 0.0;
    cplx gain{};          // sqrt(|alpha|^2) exp(j phi)
    ComplexVec steering;  // a(theta)
};

/// Fixes each target's gain phase for a trial, uniform on [0, 2 pi).
std::vector<TargetEcho> draw_target_echoes(std::span<const TargetGeometry> targets, int antennas, Rng& rng);

/// Echo with a caller-chosen phase (deterministic fixtures).
TargetEcho make_echo(const TargetGeometry& target, int antennas, double phase);

/// s = sqrt(energy) f x.
ComplexVec transmit_vector(std::span<const cplx> f, double energy, cplx symbol);

/// Noise-free part of the sensing return: sum_k alpha_k a_k (a_k^T s).
ComplexVec echo_response(std::span<const cplx> s, std::span<const TargetEcho> echoes);

/// Adds CN(0, n0 I) in place. Draws nothing when n0 == 0.
void add_noise(ComplexVec& y, double n0, Rng& rng);

/// Matched-filter sensing observation y = sum_k alpha_k a_k a_k^T s + n.
SensingObservation sense(std::span<const cplx> s, std::span<const TargetEcho> echoes, double n0, Rng& rng,
                         long slot = 0);

/// Instantaneous communication SNR E_s |alpha_u|^2 |a^T(theta_u) f|^2 / N0 (linear).
double comm_snr(std::span<const cplx> f, double symbol_energy, const UserGeometry& user, double n0);

/// Unit-energy Q-PSK symbol; BPSK (+-1) for Q = 2.
cplx draw_psk_symbol(int modulation_order, Rng& rng);

}  // namespace isac

// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <random>

#include "isac/core.hpp"

namespace isac {

/// Seeded random stream. One instance per Monte Carlo trial; never shared across threads.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : Rng(seed, 0) {}

    /// Stream for trial `stream` of an experiment seeded with `seed`.
    Rng(std::uint64_t seed, std::uint64_t stream) {
        std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                          static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32),
                          0x15ac5eedu};
        engine_.seed(seq);
    }

    double uniform() { return uniform_(engine_); }
    double exponential(double rate) { return std::exponential_distribution<double>(rate)(engine_); }
    double normal() { return normal_(engine_); }
    int uniform_int(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(engine_); }

    /// Circularly-symmetric complex Gaussian with E|z|^2 = variance.
    cplx complex_normal(double variance) {
        const double s = std::sqrt(variance / 2.0);
        const double re = normal_(engine_);
        const double im = normal_(engine_);
        return {s * re, s * im};
    }

    std::mt19937_64& engine() { return engine_; }

private:
    std::mt19937_64 engine_;
    std::uniform_real_distribution<double> uniform_{0.0, 1.0};
    std::normal_distribution<double> normal_{0.0, 1.0};
};

}  // namespace isac

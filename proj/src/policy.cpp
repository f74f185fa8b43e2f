// SPDX-License-Identifier: Apache-2.0
#include "isac/policy.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace isac {
namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};

ComplexVec beam_towards(double theta, int n) {
    ComplexVec f = conj(steering_vector(theta, n));
    const double s = 1.0 / std::sqrt(static_cast<double>(n));
    for (auto& x : f) x *= s;
    return f;
}

// sqrt(rho) f_s + sqrt((1 - rho)/N) a*(theta_u), before any normalization.
ComplexVec concurrent_raw(double rho, double theta_sector, double theta_user, int n) {
    ComplexVec f = beam_towards(theta_sector, n);
    const ComplexVec u = conj(steering_vector(theta_user, n));
    const double ws = std::sqrt(rho);
    const double wu = std::sqrt((1.0 - rho) / n);
    for (int i = 0; i < n; ++i) f[i] = ws * f[i] + wu * u[i];
    return f;
}

int advance(int sector, int count) { return sector % count + 1; }

}  // namespace

void validate_policy(const PolicySpec& policy) {
    std::visit(overloaded{
                   [](const PureComm&) {},
                   [](const TimeSharing& p) {
                       if (!(p.beta >= 0.0) || !std::isfinite(p.beta))
                           throw ConfigError("time sharing beta must be finite and >= 0");
                   },
                   [](const Concurrent& p) {
                       if (!(p.rho >= 0.0 && p.rho <= 1.0))
                           throw ConfigError("concurrent rho must lie in [0, 1]");
                   },
               },
               policy);
}

void check_time_sharing_feasible(const SystemParams& params) {
    const double bound = (static_cast<double>(params.symbols_per_packet()) + params.antennas) /
                         params.bandwidth_hz;
    if (!(params.sensing_window_s > bound)) {
        std::ostringstream msg;
        msg << "time sharing infeasible: need T_s > (B/log2(Q) + N)/W = " << bound * 1e3
            << " ms, got T_s = " << params.sensing_window_s * 1e3 << " ms";
        throw ConfigError(msg.str());
    }
}

EnergyBudget energy_budget(const PolicySpec& policy, const SystemParams& params) {
    validate_policy(policy);
    const double bps = params.bits_per_symbol();
    const double data_symbol_rate = params.packet_bits * params.packet_rate_hz / bps;
    if (!(data_symbol_rate > 0.0))
        throw ConfigError("energy budget undefined without traffic: packet rate must be > 0");

    return std::visit(
        overloaded{
            [&](const TimeSharing& p) {
                check_time_sharing_feasible(params);
                const double es = params.transmit_power_w /
                                  (data_symbol_rate + p.beta * params.antennas / params.sensing_window_s);
                return EnergyBudget{es, p.beta * es};
            },
            [&](const auto&) { return EnergyBudget{params.transmit_power_w / data_symbol_rate, 0.0}; },
        },
        policy);
}

SlotPrecoder precoder_for_slot(const PolicySpec& policy, SlotKind kind, const UserGeometry& user,
                               SweepState sweep, const SystemParams& params, PrecoderNormalization norm) {
    if (kind.type == SlotType::Idle) throw std::logic_error("precoder requested for an idle slot");
    const int n = params.antennas;
    const EnergyBudget budget = energy_budget(policy, params);

    return std::visit(
        overloaded{
            [&](const PureComm&) -> SlotPrecoder {
                if (kind.type != SlotType::Data)
                    throw std::logic_error("pure communication schedules no pilot slots");
                return {beam_towards(user.theta, n), budget.symbol_energy, sweep};
            },
            [&](const TimeSharing&) -> SlotPrecoder {
                if (kind.type == SlotType::Pilot) {
                    const double theta = codebook_angle(kind.sector, n, params.max_sweep_angle);
                    return {beam_towards(theta, n), budget.pilot_energy, sweep};
                }
                return {beam_towards(user.theta, n), budget.symbol_energy, sweep};
            },
            [&](const Concurrent& p) -> SlotPrecoder {
                if (kind.type != SlotType::Data)
                    throw std::logic_error("concurrent transmission schedules no pilot slots");
                const double theta_n = codebook_angle(sweep.next_sector, n, params.max_sweep_angle);
                ComplexVec f = concurrent_raw(p.rho, theta_n, user.theta, n);
                const double raw = norm_sq(f);
                double energy = budget.symbol_energy;
                if (norm == PrecoderNormalization::CycleAverage) {
                    double mean = 0.0;
                    for (int k = 1; k <= n; ++k) {
                        mean += norm_sq(concurrent_raw(p.rho, codebook_angle(k, n, params.max_sweep_angle),
                                                       user.theta, n));
                    }
                    mean /= n;
                    energy *= raw / mean;
                }
                const double s = 1.0 / std::sqrt(raw);
                for (auto& x : f) x *= s;
                return {std::move(f), energy, SweepState{advance(sweep.next_sector, n)}};
            },
        },
        policy);
}

std::string policy_name(const PolicySpec& policy) {
    return std::visit(overloaded{
                          [](const PureComm&) { return std::string("pure_comm"); },
                          [](const TimeSharing&) { return std::string("time_sharing"); },
                          [](const Concurrent&) { return std::string("concurrent"); },
                      },
                      policy);
}

double policy_parameter(const PolicySpec& policy) {
    return std::visit(overloaded{
                          [](const PureComm&) { return std::numeric_limits<double>::quiet_NaN(); },
                          [](const TimeSharing& p) { return p.beta; },
                          [](const Concurrent& p) { return p.rho; },
                      },
                      policy);
}

std::string policy_parameter_name(const PolicySpec& policy) {
    return std::visit(overloaded{
                          [](const PureComm&) { return std::string(); },
                          [](const TimeSharing&) { return std::string("beta"); },
                          [](const Concurrent&) { return std::string("rho"); },
                      },
                      policy);
}

}  // namespace isac

// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <variant>

#include "isac/core.hpp"
#include "isac/traffic.hpp"

namespace isac {

/// Every data slot steers the whole beam at the user.
struct PureComm {
    friend bool operator==(const PureComm&, const PureComm&) = default;
};

/// N dedicated pilot slots per window sweep the codebook; `beta` = E_p / E_s.
struct TimeSharing {
    double beta = 1.0;
    friend bool operator==(const TimeSharing&, const TimeSharing&) = default;
};

/// Data slots superimpose a sweeping sensing beam (power share `rho`) on the user beam.
struct Concurrent {
    double rho = 0.5;
    friend bool operator==(const Concurrent&, const Concurrent&) = default;
};

using PolicySpec = std::variant<PureComm, TimeSharing, Concurrent>;

/// How the concurrent-transmission combination is scaled.
enum class PrecoderNormalization {
    PerSlot,       // every slot's precoder has unit norm
    CycleAverage,  // unit norm on average over one sweep cycle; slot energy varies
};

struct EnergyBudget {
    double symbol_energy = 0.0;  // E_s [J]
    double pilot_energy = 0.0;   // E_p [J]
};

/// Position of the concurrent sweep in the codebook, 1..N. Advances on data slots only.
struct SweepState {
    int next_sector = 1;
    friend bool operator==(const SweepState&, const SweepState&) = default;
};

struct SlotPrecoder {
    ComplexVec f;        // unit norm
    double energy = 0.0; // transmit energy of the slot [J]
    SweepState sweep;    // state after this slot
};

/// Throws ConfigError if the policy parameters are out of range.
void validate_policy(const PolicySpec& policy);

/// Throws ConfigError unless T_s > (B/log2 Q + N)/W.
void check_time_sharing_feasible(const SystemParams& params);

/// Symbol and pilot energies meeting the average power constraint.
EnergyBudget energy_budget(const PolicySpec& policy, const SystemParams& params);

/// Precoder and energy for one non-idle slot.
SlotPrecoder precoder_for_slot(const PolicySpec& policy, SlotKind kind, const UserGeometry& user,
                               SweepState sweep, const SystemParams& params,
                               PrecoderNormalization norm = PrecoderNormalization::PerSlot);

/// "pure_comm", "time_sharing" or "concurrent".
std::string policy_name(const PolicySpec& policy);
/// beta or rho; NaN for pure communication.
double policy_parameter(const PolicySpec& policy);
/// Name of the tunable parameter ("beta", "rho" or "").
std::string policy_parameter_name(const PolicySpec& policy);

}  // namespace isac

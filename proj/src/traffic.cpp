// SPDX-License-Identifier: Apache-2.0
#include "isac/traffic.hpp"

#include <algorithm>
#include <numeric>
#include <string>

namespace isac {

std::vector<PacketArrival> generate_arrivals(double rate, double horizon, int n_symbols, Rng& rng,
                                             double start) {
    std::vector<PacketArrival> out;
    if (rate <= 0.0) return out;
    double t = start + rng.exponential(rate);
    const double end = start + horizon;
    while (t < end) {
        out.push_back({t, n_symbols});
        t += rng.exponential(rate);
    }
    return out;
}

std::vector<long> leading_pilot_positions(int count) {
    std::vector<long> pos(static_cast<size_t>(count));
    std::iota(pos.begin(), pos.end(), 0L);
    return pos;
}

Schedule build_schedule(std::span<const PacketArrival> arrivals, const BufferState& buffer_in,
                        double window_start, long n_slots, double symbol_rate,
                        std::span<const long> pilot_positions, int sectors) {
    Schedule out;
    out.slots.assign(static_cast<size_t>(n_slots), SlotKind::idle());
    out.buffer = buffer_in;

    for (size_t k = 0; k < pilot_positions.size(); ++k) {
        const long p = pilot_positions[k];
        if (p < 0 || p >= n_slots)
            throw ConfigError("pilot position " + std::to_string(p) + " outside the sensing window");
        if (out.slots[p].type == SlotType::Pilot)
            throw ConfigError("pilot positions overlap at slot " + std::to_string(p));
        out.slots[p] = SlotKind::pilot(static_cast<int>(k % sectors) + 1);
        ++out.pilot_slots;
    }

    auto& queue = out.buffer.queue;
    for (const auto& a : arrivals) queue.push_back(a);

    // A micro-slot of slack absorbs rounding in absolute arrival times.
    const double slot = 1.0 / symbol_rate;
    const double slack = 1e-6 * slot;
    int& remaining = out.buffer.symbols_remaining;

    for (long i = 0; i < n_slots; ++i) {
        if (out.slots[i].type == SlotType::Pilot) continue;
        if (remaining == 0 && !queue.empty()) {
            const double slot_start = window_start + static_cast<double>(i) * slot;
            if (queue.front().time <= slot_start + slack) {
                remaining = queue.front().n_symbols;
                queue.pop_front();
            }
        }
        if (remaining > 0) {
            out.slots[i] = SlotKind::data();
            ++out.data_slots;
            if (--remaining == 0) ++out.completed_packets;
        }
    }
    return out;
}

}  // namespace isac

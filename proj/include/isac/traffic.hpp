// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <deque>
#include <span>
#include <vector>

#include "isac/rng.hpp"

namespace isac {

struct PacketArrival {
    double time = 0.0;      // seconds, absolute
    int n_symbols = 0;
};

enum class SlotType : unsigned char { Idle, Data, Pilot };

/// What the base station does during one symbol slot. `sector` is only meaningful for pilots.
struct SlotKind {
    SlotType type = SlotType::Idle;
    int sector = 0;

    static constexpr SlotKind idle() { return {SlotType::Idle, 0}; }
    static constexpr SlotKind data() { return {SlotType::Data, 0}; }
    static constexpr SlotKind pilot(int n) { return {SlotType::Pilot, n}; }

    friend bool operator==(const SlotKind&, const SlotKind&) = default;
};

/// Unbounded FIFO buffer plus the partially transmitted head-of-line packet.
struct BufferState {
    std::deque<PacketArrival> queue;
    int symbols_remaining = 0;   // of the packet in service; 0 when the server is free

    bool empty() const { return queue.empty() && symbols_remaining == 0; }
    size_t packets() const { return queue.size() + (symbols_remaining > 0 ? 1 : 0); }
};

struct Schedule {
    std::vector<SlotKind> slots;
    BufferState buffer;          // state at the end of the window
    long data_slots = 0;
    long pilot_slots = 0;
    long completed_packets = 0;
};

/// Poisson arrivals on [start, start + horizon), sorted ascending.
std::vector<PacketArrival> generate_arrivals(double rate, double horizon, int n_symbols, Rng& rng,
                                             double start = 0.0);

/// Slot-by-slot plan of one sensing window.
///
/// `pilot_positions` are window-relative slot indices; the k-th listed position carries
/// Pilot((k mod sectors) + 1). Remaining slots serve the in-service packet and then the
/// FIFO queue. A packet is eligible from the first slot whose start time is not earlier
/// than its arrival. Arrivals past the window end stay queued for the next window.
Schedule build_schedule(std::span<const PacketArrival> arrivals, const BufferState& buffer_in,
                        double window_start, long n_slots, double symbol_rate,
                        std::span<const long> pilot_positions = {}, int sectors = 1);

/// First `count` slots of the window, the pilot placement used by time sharing.
std::vector<long> leading_pilot_positions(int count);

}  // namespace isac

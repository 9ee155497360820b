#pragma once

// Water-filling bandwidth estimation over active circuits and the
// total-bandwidth fitness of a download schedule.

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "poa/model.hpp"

namespace poa {

/// A relay path of one to three hops. Client traffic always uses three;
/// single-hop paths carry injected attack flows.
struct FlowPath {
    std::array<RelayIndex, 3> hops{};
    std::uint8_t length = 3;

    std::span<const RelayIndex> relays() const noexcept { return {hops.data(), length}; }

    static FlowPath of(const Circuit& c) { return FlowPath{c.hops, 3}; }
    static FlowPath one_hop(RelayIndex r) { return FlowPath{{r, r, r}, 1}; }
};

/// One iteration of the allocation loop.
struct AllocationRound {
    RelayIndex bottleneck = 0;
    double share = 0.0;
    std::vector<std::size_t> flows;
    /// Relays whose residual reached zero this round, with the number of
    /// still-unassigned flows they sit on at that moment.
    std::vector<std::pair<RelayIndex, std::size_t>> exhausted;
};

struct AllocationResult {
    std::vector<double> circuit_bw;         // per input flow, KiB/s
    std::vector<RelayIndex> bottleneck_of;  // per input flow
    std::vector<double> relay_weights;      // per relay, sum of 1/bw over bottlenecked flows
    std::vector<double> residual;           // per relay, capacity left after allocation

    double total() const;
};

/// Residuals at or below this fraction of capacity are treated as zero.
inline constexpr double kResidualEpsilon = 1e-12;

/// Repeatedly picks the relay with the smallest residual per remaining flow,
/// gives that share to each of its flows and charges every relay on those
/// flows. Ties go to the lowest relay index. With `accumulate_weights`, each
/// flow adds 1/share to its bottleneck relay's weight.
///
/// Throws LookupError for out-of-range relay indices, and std::logic_error if
/// a relay is exhausted while still carrying unassigned flows (cannot happen
/// for exact arithmetic).
AllocationResult allocate_flows(std::span<const FlowPath> flows, std::span<const double> capacities,
                                bool accumulate_weights,
                                std::vector<AllocationRound>* rounds = nullptr);

AllocationResult calc_circuit_bw(std::span<const Circuit> active, const RelayTable& relays,
                                 bool accumulate_weights);

struct ScheduledDownload {
    double start_s = 0.0;
    double end_s = 0.0;
    Circuit circuit;
};

/// Sum over ticks t = start, start + tick, ..., t <= end (both inclusive) of
/// the total bandwidth allocated to downloads with start <= t <= end.
double calc_total_bw(std::span<const ScheduledDownload> schedule, double tick_s,
                     const RelayTable& relays);

/// Same, over fixed-mode downloads carrying their assigned circuit.
/// Throws Error if any download is sized or unassigned.
double calc_total_bw(std::span<const Download> downloads, double tick_s, const RelayTable& relays);

}  // namespace poa

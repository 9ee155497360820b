#pragma once

// Core domain types: relays, circuits, downloads and candidate circuit sets.

#include <array>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <variant>
#include <vector>

namespace poa {

using RelayIndex = std::uint32_t;
using DownloadId = std::uint64_t;
using ClientId = std::uint32_t;

/// A relay as advertised. Capacities are KiB/s throughout.
struct Relay {
    std::string id;
    double capacity = 0.0;
    bool is_exit = false;
};

/// Immutable relay table. Relays are kept sorted by id so that a relay's
/// index order is its id order; every "lowest relay id" tie-break in the
/// library compares indices.
class RelayTable {
public:
    RelayTable() = default;

    /// Throws ConfigError on duplicate ids or non-positive capacity.
    explicit RelayTable(std::vector<Relay> relays);

    std::size_t size() const noexcept { return relays_.size(); }
    bool empty() const noexcept { return relays_.empty(); }
    const Relay& operator[](RelayIndex i) const { return relays_[i]; }
    const Relay& at(RelayIndex i) const;
    std::span<const Relay> relays() const noexcept { return relays_; }

    /// Throws LookupError for unknown ids.
    RelayIndex index_of(std::string_view id) const;
    std::optional<RelayIndex> find(std::string_view id) const;

    std::vector<double> capacities() const;
    std::size_t exit_count() const;

private:
    std::vector<Relay> relays_;
    std::unordered_map<std::string, RelayIndex> by_id_;
};

/// Ordered three-hop path (guard position, middle position, exit position).
struct Circuit {
    std::array<RelayIndex, 3> hops{};

    RelayIndex guard() const noexcept { return hops[0]; }
    RelayIndex middle() const noexcept { return hops[1]; }
    RelayIndex exit() const noexcept { return hops[2]; }

    bool contains(RelayIndex r) const noexcept {
        return hops[0] == r || hops[1] == r || hops[2] == r;
    }

    friend auto operator<=>(const Circuit&, const Circuit&) = default;
};

/// Same relays, any order.
bool same_relays(const Circuit& a, const Circuit& b);

/// Minimum advertised capacity over the circuit's relays.
double min_capacity(const Circuit& c, const RelayTable& relays);

/// True iff the hops are pairwise distinct and the exit-position relay can exit.
/// Throws LookupError if a hop does not resolve.
bool validate_circuit(const Circuit& c, const RelayTable& relays);

struct FixedInterval {
    double start_s = 0.0;
    double end_s = 0.0;
};

struct SizedTransfer {
    double size_kib = 0.0;
    double pause_min_ms = 0.0;
    double pause_max_ms = 0.0;
};

struct Download {
    DownloadId id = 0;
    ClientId client = 0;
    std::variant<FixedInterval, SizedTransfer> mode;
    std::optional<Circuit> circuit;

    bool is_fixed() const noexcept { return std::holds_alternative<FixedInterval>(mode); }
    /// Throws Error for sized downloads.
    const FixedInterval& interval() const;
};

/// Throws ConfigError when a download violates its mode invariant.
void check_download(const Download& d);

enum class CircuitSetKind { original, full, pruned };

std::string_view to_string(CircuitSetKind k);
CircuitSetKind parse_circuit_set_kind(std::string_view s);

struct CircuitSet {
    std::vector<Circuit> circuits;
    CircuitSetKind kind = CircuitSetKind::original;
    bool degenerate = false;

    std::size_t size() const noexcept { return circuits.size(); }
    bool empty() const noexcept { return circuits.empty(); }
};

/// Every valid circuit up to relay-set equality, one canonical ordering per
/// 3-subset that contains an exit. Canonical order: the lowest-capacity exit
/// member takes the exit slot, the other two follow by descending capacity.
CircuitSet build_full_set(const RelayTable& relays);

/// Greedy high-bandwidth construction that keeps non-exits out of the exit
/// slot whenever possible. Each emitted circuit consumes its minimum
/// capacity from all three members; exhausted relays are dropped.
CircuitSet build_pruned_set(const RelayTable& relays);

/// One circuit-selection decision as logged by the simulator.
struct SelectionRecord {
    DownloadId download = 0;
    ClientId client = 0;
    double t = 0.0;
    std::vector<Circuit> candidates;
    std::size_t chosen = 0;
    /// Relay weights the selecting party saw; relays absent were unknown.
    std::map<RelayIndex, double> weights;
};

/// Download id -> circuits the client held open when the download started.
/// Throws Error on an empty log.
std::map<DownloadId, CircuitSet> extract_original_sets(std::span<const SelectionRecord> log);

/// Throws LookupError when the download never appears in the log.
CircuitSet original_set_for(std::span<const SelectionRecord> log, DownloadId id);

/// Fixed-download trace: downloads with intervals plus, per download, the
/// candidate circuits available at its start.
struct Trace {
    RelayTable relays;
    std::vector<Download> downloads;
    std::vector<CircuitSet> original_sets;  // parallel to downloads
};

using Assignment = std::map<DownloadId, Circuit>;

}  // namespace poa

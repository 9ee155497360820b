#pragma once

// Relay-local bottleneck estimation, weight gossip and client-side selection.

#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <string_view>
#include <vector>

#include "poa/clustering.hpp"
#include "poa/model.hpp"
#include "poa/rng.hpp"

namespace poa {

/// Width of one history bucket.
inline constexpr double kBucketSeconds = 0.1;
/// Bytes per cell; histories count cells, the simulator works in KiB.
inline constexpr double kCellBytes = 512.0;
inline constexpr double kCellsPerKiB = 1024.0 / kCellBytes;

/// Per-circuit ring of 100 ms cell counts covering the most recent buckets.
/// Buckets are addressed by absolute index (time / 100 ms); advancing past
/// unseen buckets fills them with zeros.
class CellHistory {
public:
    explicit CellHistory(std::size_t capacity_buckets = 10);

    std::size_t capacity() const noexcept { return ring_.size(); }

    /// Adds cells to absolute bucket `bucket`. Buckets older than the newest
    /// one recorded are ignored once they have fallen out of the ring.
    void add(std::int64_t bucket, double cells);

    /// The `count` buckets ending at absolute bucket `now` (inclusive),
    /// oldest first. Buckets never recorded read as zero.
    std::vector<double> window(std::int64_t now, std::size_t count) const;

    /// True when nothing was recorded in the `count` buckets ending at `now`.
    bool idle(std::int64_t now, std::size_t count) const;

    std::int64_t newest() const noexcept { return newest_; }

private:
    std::vector<double> ring_;
    std::int64_t newest_ = -1;
};

/// Largest cell count over any `granularity_buckets` contiguous buckets,
/// as cells per second. Histories shorter than the granularity use all
/// buckets. Empty input gives 0.
double circuit_bw_estimate(std::span<const double> buckets, std::size_t granularity_buckets);

/// All sliding-window rates (cells per second) of width `granularity_buckets`.
std::vector<double> window_rates(std::span<const double> buckets, std::size_t granularity_buckets);

enum class ClusterMethod { jenks_two, jenks_best, head_tail, kde };

std::string_view to_string(ClusterMethod m);
ClusterMethod parse_cluster_method(std::string_view s);

struct EstimatorParams {
    double window_s = 1.0;
    int granularity_ms = 100;
    ClusterMethod method = ClusterMethod::head_tail;
    double tau = 0.9;         // jenks_best GVF threshold
    double threshold = 0.4;   // head/tail head-fraction threshold

    /// Throws ConfigError unless the granularity is a positive multiple of
    /// 100 ms no larger than the window.
    void validate() const;
    std::size_t window_buckets() const;
    std::size_t granularity_buckets() const;
};

/// One circuit's history as seen by a relay.
struct CircuitHistoryView {
    CircuitId id = 0;
    std::span<const double> buckets;  // window, oldest first
};

struct LocalWeight {
    double weight = 0.0;
    std::vector<CircuitId> bottlenecks;
};

/// Sum of 1/estimate over the circuits the chosen method flags. Circuits
/// with a zero estimate never enter clustering.
LocalWeight local_weight(std::span<const CircuitHistoryView> circuits, const EstimatorParams& params);

/// True during the second in which floor(now) and the circuit id agree mod 5.
bool gossip_due(CircuitId circ_id, double now_s);

/// Lowest summed gossiped weight (unknown relays count 0), then highest
/// minimum advertised capacity, then bandwidth-weighted random among the rest.
/// Throws Error on an empty list.
std::size_t client_select(std::span<const Circuit> acceptable,
                          const std::map<RelayIndex, double>& gossiped, const RelayTable& relays,
                          Rng& rng);

/// The deterministic part of client_select: indices surviving the weight
/// and capacity filters.
std::vector<std::size_t> client_select_ties(std::span<const Circuit> acceptable,
                                            const std::map<RelayIndex, double>& gossiped,
                                            const RelayTable& relays);

/// Vanilla selection: random over acceptable circuits weighted by their
/// minimum advertised capacity.
std::size_t weighted_random_select(std::span<const Circuit> acceptable, const RelayTable& relays,
                                   Rng& rng);

}  // namespace poa

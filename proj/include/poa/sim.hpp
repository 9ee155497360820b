#pragma once

// Deterministic tick-driven flow-level simulation of clients downloading
// over three-hop circuits, with pluggable circuit-selection policies.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "poa/decentralized.hpp"
#include "poa/model.hpp"
#include "poa/rng.hpp"

namespace poa {

enum class ClientKind { web, bulk, perf_50k, perf_1m, perf_5m, fixed };
enum class PolicyKind { vanilla, ga, central_dwc, decentral_dwc };

std::string_view to_string(ClientKind k);
std::string_view to_string(PolicyKind p);
PolicyKind parse_policy(std::string_view s);

struct ClientMix {
    std::size_t web = 0;
    std::size_t bulk = 0;
    std::size_t perf_50k = 0;
    std::size_t perf_1m = 0;
    std::size_t perf_5m = 0;

    std::size_t total() const noexcept { return web + bulk + perf_50k + perf_1m + perf_5m; }
};

struct ClientModel {
    double web_size_kib = 320.0;
    double web_pause_min_ms = 1.0;
    double web_pause_max_ms = 60000.0;
    double bulk_size_kib = 5120.0;
    double perf_pause_ms = 60000.0;
    double start_spread_s = 60.0;  // first downloads start uniformly in [0, spread)
};

/// Single-hop flows that saturate one relay from `start_s` on.
struct AttackConfig {
    std::string target;
    std::size_t flows = 50;
    double start_s = 0.0;
    std::optional<double> end_s;
};

struct ExperimentConfig {
    RelayTable relays;
    ClientMix clients;
    ClientModel model;
    PolicyKind policy = PolicyKind::vanilla;
    Assignment mapping;               // ga policy
    std::optional<Trace> fixed_trace;  // fixed download model when set
    EstimatorParams estimator;
    std::size_t circuits_per_client = 10;
    double tick_s = 1.0;
    double duration_s = 600.0;
    std::uint64_t seed = 1;
    double history_s = 10.0;  // cell history retained per circuit
    std::optional<AttackConfig> attack;

    /// Throws ConfigError with the offending field.
    void validate() const;
};

struct DownloadRecord {
    DownloadId id = 0;
    ClientId client = 0;
    ClientKind kind = ClientKind::web;
    double size_kib = 0.0;
    double start_s = 0.0;
    std::optional<double> first_byte_s;
    std::optional<double> end_s;  // set once complete
    double delivered_kib = 0.0;
    Circuit circuit;
};

struct GossipRecord {
    double t = 0.0;
    RelayIndex relay = 0;
    double weight = 0.0;
    std::size_t bottlenecks = 0;
    std::size_t active_circuits = 0;
};

/// Per-second view of the attacked relay.
struct TargetSample {
    double t = 0.0;
    double weight = 0.0;
    std::size_t client_circuits = 0;  // client downloads currently through the target
    std::size_t completed = 0;        // downloads through the target completed in the last second
    double attack_kibps = 0.0;
};

struct RunMetrics {
    std::string policy;
    std::uint64_t seed = 0;
    double tick_s = 1.0;
    double duration_s = 0.0;
    RelayTable relays;

    std::vector<double> tick_time;
    std::vector<double> client_bw_kibps;  // allocated to client downloads
    std::vector<double> delivered_kib;    // bytes actually moved, per tick
    std::vector<std::vector<double>> utilization;  // [tick][relay], allocated / capacity
    std::vector<DownloadRecord> downloads;
    std::vector<SelectionRecord> selections;
    std::vector<GossipRecord> gossip;
    std::vector<TargetSample> target;

    double total_delivered_kib() const;
    std::size_t completed_downloads() const;
};

/// Per-relay, per-circuit cell histories.
class RelayHistories {
public:
    RelayHistories(std::size_t n_relays, std::size_t capacity_buckets);

    void add(RelayIndex relay, CircuitId circuit, std::int64_t bucket, double cells);

    /// Windows of the circuits on `relay` with traffic among the last
    /// `count` buckets ending at `now`, ordered by circuit id.
    std::vector<std::pair<CircuitId, std::vector<double>>> windows(RelayIndex relay, std::int64_t now,
                                                                   std::size_t count) const;

    /// Drops circuits with no traffic in the retained history.
    void prune(std::int64_t now);

    std::size_t capacity() const noexcept { return capacity_; }
    std::size_t relays() const noexcept { return per_relay_.size(); }

private:
    std::size_t capacity_;
    std::vector<std::map<CircuitId, CellHistory>> per_relay_;
};

/// Handed to the probe hook at each tick in which the central authority
/// made at least one selection, before that tick's first selection.
struct ProbeContext {
    double t = 0.0;
    std::int64_t last_bucket = 0;                   // newest completed history bucket
    std::span<const std::size_t> central_counts;     // per relay, bottlenecked circuits
    std::span<const char> relay_active;              // per relay, on an active circuit
    const RelayHistories* histories = nullptr;
};

struct RunHooks {
    std::function<void(const ProbeContext&)> on_central_probe;
};

/// Runs the experiment. Identical configs give bit-identical metrics.
/// Throws Error if the ga mapping misses a started download.
RunMetrics run(const ExperimentConfig& config, const RunHooks& hooks = {});

/// `count` valid circuits: exit drawn by capacity among exits, the other two
/// drawn by capacity among the remaining relays. Throws Error without an exit
/// or with fewer than three relays.
CircuitSet build_client_circuits(const RelayTable& relays, std::size_t count, Rng& rng);

struct ExtractedTrace {
    Trace trace;
    std::size_t dropped = 0;  // incomplete downloads
};

/// Completed downloads become fixed intervals carrying the logged circuit
/// and the candidate set seen at their start.
ExtractedTrace extract_fixed_trace(const RunMetrics& metrics);

/// Deterministic heterogeneous relay population for experiments and tests.
/// Capacities are log-uniform in [min_kibps, max_kibps]; ids are zero padded.
RelayTable make_relay_fixture(std::size_t n, std::size_t exits, double min_kibps, double max_kibps,
                              std::uint64_t seed);

}  // namespace poa

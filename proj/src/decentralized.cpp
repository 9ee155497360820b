#include "poa/decentralized.hpp"

#include <algorithm>
#include <cmath>

#include "poa/error.hpp"

namespace poa {

CellHistory::CellHistory(std::size_t capacity_buckets) : ring_(std::max<std::size_t>(1, capacity_buckets), 0.0) {}

void CellHistory::add(std::int64_t bucket, double cells) {
    const auto cap = static_cast<std::int64_t>(ring_.size());
    if (bucket > newest_) {
        const std::int64_t gap = bucket - newest_;
        if (newest_ < 0 || gap >= cap) {
            std::fill(ring_.begin(), ring_.end(), 0.0);
        } else {
            for (std::int64_t b = newest_ + 1; b <= bucket; ++b) ring_[static_cast<std::size_t>(b % cap)] = 0.0;
        }
        newest_ = bucket;
    }
    if (bucket < 0 || newest_ - bucket >= cap) return;
    ring_[static_cast<std::size_t>(bucket % cap)] += cells;
}

std::vector<double> CellHistory::window(std::int64_t now, std::size_t count) const {
    std::vector<double> out(count, 0.0);
    const auto cap = static_cast<std::int64_t>(ring_.size());
    for (std::size_t i = 0; i < count; ++i) {
        const std::int64_t b = now - static_cast<std::int64_t>(count - 1 - i);
        if (b < 0 || b > newest_ || newest_ - b >= cap) continue;
        out[i] = ring_[static_cast<std::size_t>(b % cap)];
    }
    return out;
}

bool CellHistory::idle(std::int64_t now, std::size_t count) const {
    const auto cap = static_cast<std::int64_t>(ring_.size());
    for (std::size_t i = 0; i < count; ++i) {
        const std::int64_t b = now - static_cast<std::int64_t>(i);
        if (b < 0) break;
        if (b > newest_ || newest_ - b >= cap) continue;
        if (ring_[static_cast<std::size_t>(b % cap)] != 0.0) return false;
    }
    return true;
}

double circuit_bw_estimate(std::span<const double> buckets, std::size_t granularity_buckets) {
    if (buckets.empty() || granularity_buckets == 0) return 0.0;
    const std::size_t g = std::min(granularity_buckets, buckets.size());
    double sum = 0.0;
    for (std::size_t i = 0; i < g; ++i) sum += buckets[i];
    double best = sum;
    for (std::size_t i = g; i < buckets.size(); ++i) {
        sum += buckets[i] - buckets[i - g];
        best = std::max(best, sum);
    }
    return std::max(0.0, best) / (static_cast<double>(granularity_buckets) * kBucketSeconds);
}

std::vector<double> window_rates(std::span<const double> buckets, std::size_t granularity_buckets) {
    std::vector<double> out;
    if (buckets.empty() || granularity_buckets == 0) return out;
    const std::size_t g = std::min(granularity_buckets, buckets.size());
    const double scale = 1.0 / (static_cast<double>(granularity_buckets) * kBucketSeconds);
    for (std::size_t i = 0; i + g <= buckets.size(); ++i) {
        double sum = 0.0;
        for (std::size_t k = i; k < i + g; ++k) sum += buckets[k];
        out.push_back(sum * scale);
    }
    return out;
}

std::string_view to_string(ClusterMethod m) {
    switch (m) {
        case ClusterMethod::jenks_two: return "jenks_two";
        case ClusterMethod::jenks_best: return "jenks_best";
        case ClusterMethod::head_tail: return "head_tail";
        case ClusterMethod::kde: return "kde";
    }
    return "?";
}

ClusterMethod parse_cluster_method(std::string_view s) {
    if (s == "jenks_two" || s == "jenks2") return ClusterMethod::jenks_two;
    if (s == "jenks_best") return ClusterMethod::jenks_best;
    if (s == "head_tail") return ClusterMethod::head_tail;
    if (s == "kde") return ClusterMethod::kde;
    throw ConfigError("method", "unknown clustering method '" + std::string(s) + "'");
}

void EstimatorParams::validate() const {
    if (!(window_s > 0.0)) throw ConfigError("window_s", "must be positive");
    if (granularity_ms <= 0 || granularity_ms % 100 != 0) {
        throw ConfigError("granularity_ms", "must be a positive multiple of 100");
    }
    if (granularity_ms > window_s * 1000.0 + 1e-9) {
        throw ConfigError("granularity_ms", "must not exceed the window");
    }
}

std::size_t EstimatorParams::window_buckets() const {
    return static_cast<std::size_t>(std::llround(window_s / kBucketSeconds));
}

std::size_t EstimatorParams::granularity_buckets() const {
    return static_cast<std::size_t>(granularity_ms / 100);
}

LocalWeight local_weight(std::span<const CircuitHistoryView> circuits, const EstimatorParams& params) {
    const std::size_t g = params.granularity_buckets();
    std::vector<CircuitSample> samples;
    std::vector<double> pooled;
    for (const auto& c : circuits) {
        const double est = circuit_bw_estimate(c.buckets, g);
        if (!(est > 0.0)) continue;
        samples.push_back({c.id, est});
        if (params.method == ClusterMethod::kde) {
            for (double r : window_rates(c.buckets, g)) {
                if (r > 0.0) pooled.push_back(r);
            }
        }
    }
    LocalWeight out;
    if (samples.empty()) return out;
    switch (params.method) {
        case ClusterMethod::jenks_two: out.bottlenecks = cluster_jenks_two(samples); break;
        case ClusterMethod::jenks_best: out.bottlenecks = cluster_jenks_best(samples, params.tau); break;
        case ClusterMethod::head_tail: out.bottlenecks = cluster_head_tail(samples, params.threshold); break;
        case ClusterMethod::kde: out.bottlenecks = cluster_kde(pooled, samples); break;
    }
    // Sum in input order so the result does not depend on id labels.
    for (const auto& s : samples) {
        if (std::binary_search(out.bottlenecks.begin(), out.bottlenecks.end(), s.id)) out.weight += 1.0 / s.bw;
    }
    return out;
}

bool gossip_due(CircuitId circ_id, double now_s) {
    const auto sec = static_cast<std::int64_t>(std::floor(now_s));
    const auto m = ((sec % 5) + 5) % 5;
    return static_cast<std::uint64_t>(m) == circ_id % 5;
}

namespace {

bool weight_less(double a, double b) {
    return a < b - 1e-12 * std::max({1.0, std::abs(a), std::abs(b)});
}

}  // namespace

std::vector<std::size_t> client_select_ties(std::span<const Circuit> acceptable,
                                            const std::map<RelayIndex, double>& gossiped,
                                            const RelayTable& relays) {
    std::vector<double> weight(acceptable.size(), 0.0);
    double best_w = 0.0;
    for (std::size_t i = 0; i < acceptable.size(); ++i) {
        for (auto h : acceptable[i].hops) {
            relays.at(h);
            if (auto it = gossiped.find(h); it != gossiped.end()) weight[i] += it->second;
        }
        if (i == 0 || weight_less(weight[i], best_w)) best_w = weight[i];
    }
    std::vector<std::size_t> lightest;
    double best_cap = 0.0;
    for (std::size_t i = 0; i < acceptable.size(); ++i) {
        if (weight_less(best_w, weight[i])) continue;
        lightest.push_back(i);
        best_cap = std::max(best_cap, min_capacity(acceptable[i], relays));
    }
    std::vector<std::size_t> out;
    for (auto i : lightest) {
        if (min_capacity(acceptable[i], relays) == best_cap) out.push_back(i);
    }
    return out;
}

std::size_t client_select(std::span<const Circuit> acceptable,
                          const std::map<RelayIndex, double>& gossiped, const RelayTable& relays,
                          Rng& rng) {
    if (acceptable.empty()) throw Error("no acceptable circuits");
    const auto ties = client_select_ties(acceptable, gossiped, relays);
    if (ties.size() == 1) return ties.front();
    std::vector<Circuit> rest;
    for (auto i : ties) rest.push_back(acceptable[i]);
    return ties[weighted_random_select(rest, relays, rng)];
}

std::size_t weighted_random_select(std::span<const Circuit> acceptable, const RelayTable& relays,
                                   Rng& rng) {
    if (acceptable.empty()) throw Error("no acceptable circuits");
    std::vector<double> w;
    w.reserve(acceptable.size());
    for (const auto& c : acceptable) w.push_back(min_capacity(c, relays));
    return rng.weighted_index(w);
}

}  // namespace poa

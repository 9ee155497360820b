#include "poa/bandwidth.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "poa/error.hpp"

namespace poa {

double AllocationResult::total() const {
    return std::accumulate(circuit_bw.begin(), circuit_bw.end(), 0.0);
}

AllocationResult allocate_flows(std::span<const FlowPath> flows, std::span<const double> capacities,
                                bool accumulate_weights, std::vector<AllocationRound>* rounds) {
    const std::size_t n_relays = capacities.size();
    AllocationResult out;
    out.circuit_bw.assign(flows.size(), 0.0);
    out.bottleneck_of.assign(flows.size(), 0);
    out.relay_weights.assign(n_relays, 0.0);
    out.residual.assign(capacities.begin(), capacities.end());
    if (flows.empty()) return out;

    // Relay -> flows (CSR layout).
    std::vector<std::size_t> count(n_relays, 0);
    for (const auto& f : flows) {
        if (f.length < 1 || f.length > 3) throw Error("flow path must have 1 to 3 hops");
        for (auto r : f.relays()) {
            if (r >= n_relays) {
                throw LookupError("flow references unknown relay index " + std::to_string(r));
            }
            ++count[r];
        }
    }
    std::vector<std::size_t> offset(n_relays + 1, 0);
    for (std::size_t r = 0; r < n_relays; ++r) offset[r + 1] = offset[r] + count[r];
    std::vector<std::size_t> members(offset.back());
    {
        auto cursor = offset;
        for (std::size_t f = 0; f < flows.size(); ++f) {
            for (auto r : flows[f].relays()) members[cursor[r]++] = f;
        }
    }

    auto& residual = out.residual;
    std::vector<char> done(flows.size(), 0);
    std::vector<RelayIndex> touched;
    std::size_t remaining = flows.size();

    while (remaining > 0) {
        std::size_t best = n_relays;
        double best_share = 0.0;
        for (std::size_t r = 0; r < n_relays; ++r) {
            if (count[r] == 0) continue;
            const double share = residual[r] / static_cast<double>(count[r]);
            if (best == n_relays || share < best_share) {
                best = r;
                best_share = share;
            }
        }

        AllocationRound round;
        round.bottleneck = static_cast<RelayIndex>(best);
        round.share = best_share;
        touched.clear();

        for (std::size_t k = offset[best]; k < offset[best + 1]; ++k) {
            const std::size_t f = members[k];
            if (done[f]) continue;
            done[f] = 1;
            --remaining;
            out.circuit_bw[f] = best_share;
            out.bottleneck_of[f] = static_cast<RelayIndex>(best);
            if (accumulate_weights) out.relay_weights[best] += 1.0 / best_share;
            for (auto r : flows[f].relays()) {
                residual[r] -= best_share;
                --count[r];
                if (residual[r] <= kResidualEpsilon * capacities[r]) residual[r] = 0.0;
                touched.push_back(r);
            }
            if (rounds) round.flows.push_back(f);
        }
        residual[best] = 0.0;

        std::sort(touched.begin(), touched.end());
        touched.erase(std::unique(touched.begin(), touched.end()), touched.end());
        for (auto r : touched) {
            if (residual[r] != 0.0) continue;
            if (count[r] != 0) {
                throw std::logic_error("relay " + std::to_string(r) + " exhausted with " +
                                       std::to_string(count[r]) + " unassigned flows");
            }
            if (rounds) round.exhausted.emplace_back(r, count[r]);
        }
        if (rounds) rounds->push_back(std::move(round));
    }
    return out;
}

AllocationResult calc_circuit_bw(std::span<const Circuit> active, const RelayTable& relays,
                                 bool accumulate_weights) {
    std::vector<FlowPath> flows;
    flows.reserve(active.size());
    for (const auto& c : active) flows.push_back(FlowPath::of(c));
    const auto caps = relays.capacities();
    return allocate_flows(flows, caps, accumulate_weights);
}

namespace {

constexpr double kTickSlack = 1e-9;

}  // namespace

double calc_total_bw(std::span<const ScheduledDownload> schedule, double tick_s,
                     const RelayTable& relays) {
    if (!(tick_s > 0.0)) throw Error("tick must be positive");
    if (schedule.empty()) return 0.0;

    double t0 = schedule.front().start_s;
    double t1 = schedule.front().end_s;
    for (const auto& d : schedule) {
        t0 = std::min(t0, d.start_s);
        t1 = std::max(t1, d.end_s);
    }
    const auto n_ticks = static_cast<std::int64_t>(std::floor((t1 - t0) / tick_s + kTickSlack)) + 1;

    // The active set only changes where a download enters or leaves, so each
    // constant stretch of ticks is allocated once and weighted by its length.
    struct Event {
        std::int64_t tick;
        bool enter;
        std::size_t download;
    };
    std::vector<Event> events;
    for (std::size_t i = 0; i < schedule.size(); ++i) {
        const auto& d = schedule[i];
        const auto first = static_cast<std::int64_t>(std::ceil((d.start_s - t0) / tick_s - kTickSlack));
        const auto last = std::min(
            n_ticks - 1, static_cast<std::int64_t>(std::floor((d.end_s - t0) / tick_s + kTickSlack)));
        if (first > last) continue;
        events.push_back({first, true, i});
        events.push_back({last + 1, false, i});
    }
    std::sort(events.begin(), events.end(), [](const Event& a, const Event& b) {
        if (a.tick != b.tick) return a.tick < b.tick;
        return a.download < b.download;
    });

    const auto caps = relays.capacities();
    std::vector<char> active(schedule.size(), 0);
    std::vector<FlowPath> flows;
    double total = 0.0;
    std::size_t e = 0;
    while (e < events.size()) {
        const auto tick = events[e].tick;
        for (; e < events.size() && events[e].tick == tick; ++e) {
            active[events[e].download] = events[e].enter ? 1 : 0;
        }
        if (e == events.size()) break;
        const auto span_ticks = events[e].tick - tick;
        flows.clear();
        for (std::size_t i = 0; i < schedule.size(); ++i) {
            if (active[i]) flows.push_back(FlowPath::of(schedule[i].circuit));
        }
        if (flows.empty()) continue;
        total += allocate_flows(flows, caps, false).total() * static_cast<double>(span_ticks);
    }
    return total;
}

double calc_total_bw(std::span<const Download> downloads, double tick_s, const RelayTable& relays) {
    std::vector<ScheduledDownload> schedule;
    schedule.reserve(downloads.size());
    for (const auto& d : downloads) {
        const auto& iv = d.interval();
        if (!d.circuit) throw Error("download " + std::to_string(d.id) + " has no assigned circuit");
        schedule.push_back({iv.start_s, iv.end_s, *d.circuit});
    }
    return calc_total_bw(schedule, tick_s, relays);
}

}  // namespace poa

#include "poa/online_dwc.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "poa/bandwidth.hpp"
#include "poa/error.hpp"

namespace poa {

namespace {

// Summed float weights that agree to this relative tolerance count as a tie.
bool less_than(double a, double b) {
    return a < b - 1e-12 * std::max({1.0, std::abs(a), std::abs(b)});
}

}  // namespace

DwcDecision select_circuit_dwc(std::span<const Circuit> candidates, std::span<const Circuit> active,
                               const RelayTable& relays) {
    if (candidates.empty()) throw Error("no candidate circuits");
    for (const auto& c : candidates) {
        for (auto h : c.hops) relays.at(h);
    }
    auto alloc = calc_circuit_bw(active, relays, true);

    DwcDecision best;
    bool have = false;
    for (std::size_t i = 0; i < candidates.size(); ++i) {
        const auto& c = candidates[i];
        double weight = 0.0;
        double avail = alloc.residual[c.hops[0]];
        for (auto h : c.hops) {
            weight += alloc.relay_weights[h];
            avail = std::min(avail, alloc.residual[h]);
        }
        bool take = !have;
        if (have) {
            if (less_than(weight, best.weight)) {
                take = true;
            } else if (!less_than(best.weight, weight) && avail > best.available) {
                take = true;
            }
        }
        if (take) {
            best.index = i;
            best.weight = weight;
            best.available = avail;
            have = true;
        }
    }
    best.relay_weights = std::move(alloc.relay_weights);
    return best;
}

Assignment process_trace_online(const Trace& trace, std::span<const CircuitSet> candidates) {
    if (candidates.size() != trace.downloads.size()) {
        throw Error("candidate sets do not match the trace");
    }
    std::vector<std::size_t> order(trace.downloads.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        const auto& da = trace.downloads[a];
        const auto& db = trace.downloads[b];
        if (da.interval().start_s != db.interval().start_s) {
            return da.interval().start_s < db.interval().start_s;
        }
        return da.id < db.id;
    });

    struct Active {
        double end_s;
        Circuit circuit;
    };
    std::vector<Active> active;
    std::vector<Circuit> active_circuits;
    Assignment out;
    for (auto i : order) {
        const auto& d = trace.downloads[i];
        const double start = d.interval().start_s;
        std::erase_if(active, [&](const Active& a) { return a.end_s <= start; });
        active_circuits.clear();
        for (const auto& a : active) active_circuits.push_back(a.circuit);
        if (candidates[i].empty()) {
            throw Error("download " + std::to_string(d.id) + " has no candidate circuits");
        }
        const auto decision = select_circuit_dwc(candidates[i].circuits, active_circuits, trace.relays);
        const Circuit chosen = candidates[i].circuits[decision.index];
        out[d.id] = chosen;
        active.push_back({d.interval().end_s, chosen});
    }
    return out;
}

}  // namespace poa

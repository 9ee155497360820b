#include "poa/adversary.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "poa/decentralized.hpp"
#include "poa/error.hpp"

namespace poa {

std::vector<EstimatePair> pair_observations(std::span<const BottleneckObservation> local,
                                            std::span<const BottleneckObservation> central,
                                            double slack_s) {
    std::map<RelayIndex, std::vector<const BottleneckObservation*>> by_relay;
    for (const auto& o : local) by_relay[o.relay].push_back(&o);
    std::vector<EstimatePair> out;
    for (const auto& c : central) {
        auto it = by_relay.find(c.relay);
        if (it == by_relay.end()) continue;
        const BottleneckObservation* best = nullptr;
        for (const auto* o : it->second) {
            const double dt = std::abs(o->t - c.t);
            if (dt > slack_s + 1e-9) continue;
            if (!best || dt < std::abs(best->t - c.t)) best = o;
        }
        if (best) out.push_back({best->count, c.count});
    }
    return out;
}

double mse_bottlenecks(std::span<const EstimatePair> pairs) {
    if (pairs.empty()) throw Error("no paired bottleneck observations");
    double sum = 0.0;
    for (const auto& p : pairs) {
        const double d = p.local - p.central;
        sum += d * d;
    }
    return sum / static_cast<double>(pairs.size());
}

double weighted_random_estimator(std::span<const double> central_pool, Rng& rng) {
    if (central_pool.empty()) throw Error("empty estimate pool");
    return central_pool[rng.index(central_pool.size())];
}

double weighted_random_mse(std::span<const double> central, Rng& rng, std::size_t draws_per_pair) {
    if (central.empty()) throw Error("no paired bottleneck observations");
    double sum = 0.0;
    std::size_t n = 0;
    for (double truth : central) {
        for (std::size_t k = 0; k < draws_per_pair; ++k) {
            const double d = weighted_random_estimator(central, rng) - truth;
            sum += d * d;
            ++n;
        }
    }
    return sum / static_cast<double>(n);
}

LyingResult lying_relay_reselect(std::span<const SelectionRecord> log, RelayIndex liar,
                                 const RelayTable& relays) {
    relays.at(liar);
    std::vector<double> before(relays.size(), 0.0);
    std::vector<double> after(relays.size(), 0.0);
    LyingResult out;
    for (const auto& rec : log) {
        if (rec.candidates.empty()) continue;
        const Circuit& logged = rec.candidates.at(rec.chosen);
        std::size_t choice = rec.chosen;
        const bool liar_seen = std::any_of(rec.candidates.begin(), rec.candidates.end(),
                                           [&](const Circuit& c) { return c.contains(liar); });
        if (liar_seen) {
            auto weights = rec.weights;
            weights[liar] = 0.0;
            const auto ties = client_select_ties(rec.candidates, weights, relays);
            if (std::find(ties.begin(), ties.end(), rec.chosen) == ties.end()) choice = ties.front();
        }
        if (choice != rec.chosen) ++out.changed_decisions;
        for (auto h : logged.hops) before[h] += 1.0;
        for (auto h : rec.candidates[choice].hops) after[h] += 1.0;
    }
    const double total = static_cast<double>(log.size());
    for (RelayIndex r = 0; r < relays.size(); ++r) {
        RelayShare s;
        s.relay = r;
        if (total > 0) {
            s.before = before[r] / total;
            s.after = after[r] / total;
        }
        out.shares.push_back(s);
        out.delta_cdf.push_back(s.delta());
    }
    std::sort(out.delta_cdf.begin(), out.delta_cdf.end());
    return out;
}

double pearson(std::span<const double> x, std::span<const double> y) {
    const std::size_t n = std::min(x.size(), y.size());
    if (n < 2) return 0.0;
    const double mx = std::accumulate(x.begin(), x.begin() + static_cast<std::ptrdiff_t>(n), 0.0) / static_cast<double>(n);
    const double my = std::accumulate(y.begin(), y.begin() + static_cast<std::ptrdiff_t>(n), 0.0) / static_cast<double>(n);
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
        syy += (y[i] - my) * (y[i] - my);
    }
    if (sxx <= 0.0 || syy <= 0.0) return 0.0;
    return sxy / std::sqrt(sxx * syy);
}

namespace {

std::vector<double> ranks(std::span<const double> v) {
    std::vector<std::size_t> order(v.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
    std::vector<double> r(v.size());
    for (std::size_t i = 0; i < order.size();) {
        std::size_t j = i;
        while (j + 1 < order.size() && v[order[j + 1]] == v[order[i]]) ++j;
        const double avg = 0.5 * static_cast<double>(i + j) + 1.0;
        for (std::size_t k = i; k <= j; ++k) r[order[k]] = avg;
        i = j + 1;
    }
    return r;
}

}  // namespace

double spearman(std::span<const double> x, std::span<const double> y) {
    const auto rx = ranks(x);
    const auto ry = ranks(y);
    return pearson(rx, ry);
}

CorrelationReport weight_correlation(std::span<const GossipRecord> gossip) {
    std::map<RelayIndex, std::vector<const GossipRecord*>> by_relay;
    for (const auto& g : gossip) by_relay[g.relay].push_back(&g);
    CorrelationReport out;
    for (auto& [relay, recs] : by_relay) {
        std::stable_sort(recs.begin(), recs.end(),
                         [](const GossipRecord* a, const GossipRecord* b) { return a->t < b->t; });
        for (std::size_t i = 1; i < recs.size(); ++i) {
            const double dw = recs[i]->weight - recs[i - 1]->weight;
            if (dw == 0.0) continue;
            out.pairs.push_back({relay, recs[i]->t, dw,
                                 static_cast<double>(recs[i]->bottlenecks) -
                                     static_cast<double>(recs[i - 1]->bottlenecks)});
        }
    }
    std::vector<double> x, y;
    for (const auto& p : out.pairs) {
        x.push_back(p.d_bottlenecks);
        y.push_back(p.d_weight);
    }
    out.pearson = pearson(x, y);
    out.spearman = spearman(x, y);
    return out;
}

DosReport run_dos(ExperimentConfig config, const std::string& target, std::size_t n_onehop,
                  double attack_start_s, double settle_s) {
    AttackConfig attack;
    attack.target = target;
    attack.flows = n_onehop;
    attack.start_s = attack_start_s;
    config.attack = attack;
    const RelayIndex t_idx = config.relays.index_of(target);
    const double cap_cells = config.relays[t_idx].capacity * kCellsPerKiB;

    const auto metrics = run(config);
    DosReport rep;
    rep.policy = metrics.policy;
    rep.n_squared_over_bw = static_cast<double>(n_onehop) * static_cast<double>(n_onehop) / cap_cells;
    double sum = 0.0;
    std::size_t count = 0;
    for (const auto& s : metrics.target) {
        if (s.t <= attack_start_s + 1e-9) {
            rep.completed_before += s.completed;
        } else if (s.t > attack_start_s + settle_s) {
            rep.completed_during += s.completed;
            sum += s.weight;
            ++count;
        }
    }
    rep.steady_weight = count ? sum / static_cast<double>(count) : 0.0;
    rep.series = metrics.target;
    return rep;
}

}  // namespace poa

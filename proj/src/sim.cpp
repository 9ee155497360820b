#include "poa/sim.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

#include "poa/bandwidth.hpp"
#include "poa/error.hpp"
#include "poa/online_dwc.hpp"

namespace poa {

std::string_view to_string(ClientKind k) {
    switch (k) {
        case ClientKind::web: return "web";
        case ClientKind::bulk: return "bulk";
        case ClientKind::perf_50k: return "perf_50k";
        case ClientKind::perf_1m: return "perf_1m";
        case ClientKind::perf_5m: return "perf_5m";
        case ClientKind::fixed: return "fixed";
    }
    return "?";
}

std::string_view to_string(PolicyKind p) {
    switch (p) {
        case PolicyKind::vanilla: return "vanilla";
        case PolicyKind::ga: return "ga";
        case PolicyKind::central_dwc: return "central_dwc";
        case PolicyKind::decentral_dwc: return "decentral_dwc";
    }
    return "?";
}

PolicyKind parse_policy(std::string_view s) {
    if (s == "vanilla") return PolicyKind::vanilla;
    if (s == "ga") return PolicyKind::ga;
    if (s == "central_dwc" || s == "central") return PolicyKind::central_dwc;
    if (s == "decentral_dwc" || s == "decentral") return PolicyKind::decentral_dwc;
    throw ConfigError("policy", "unknown policy '" + std::string(s) + "'");
}

namespace {

constexpr double kEps = 1e-9;
constexpr CircuitId kAttackCircuitBase = 1'000'000'000'000ULL;
constexpr DownloadId kDownloadsPerClient = 1'000'000;

bool is_bucket_multiple(double seconds) {
    const double b = seconds / kBucketSeconds;
    return b > 0.5 && std::abs(b - std::round(b)) < 1e-6;
}

std::int64_t bucket_of(double t) { return std::llround(t / kBucketSeconds); }

}  // namespace

void ExperimentConfig::validate() const {
    if (relays.size() < 3) throw ConfigError("relays", "need at least three relays");
    if (relays.exit_count() == 0) throw ConfigError("relays", "need at least one exit relay");
    if (!(duration_s > 0.0)) throw ConfigError("duration_s", "must be positive");
    if (!is_bucket_multiple(tick_s)) throw ConfigError("tick_s", "must be a positive multiple of 0.1 s");
    if (circuits_per_client == 0) throw ConfigError("circuits_per_client", "must be positive");
    if (!(history_s >= estimator.window_s)) throw ConfigError("history_s", "must cover the estimator window");
    if (model.web_pause_min_ms < 0 || model.web_pause_max_ms < model.web_pause_min_ms) {
        throw ConfigError("client_model.web_pause_ms", "invalid pause range");
    }
    if (!(model.web_size_kib > 0 && model.bulk_size_kib > 0)) {
        throw ConfigError("client_model", "download sizes must be positive");
    }
    if (model.start_spread_s < 0) throw ConfigError("client_model.start_spread_s", "must be nonnegative");
    estimator.validate();
    if (policy == PolicyKind::ga && !fixed_trace) {
        throw ConfigError("policy", "ga policy needs a fixed download trace");
    }
    if (attack) {
        if (!relays.find(attack->target)) throw ConfigError("attack.target", "unknown relay '" + attack->target + "'");
        if (attack->start_s < 0) throw ConfigError("attack.start_s", "must be nonnegative");
    }
}

double RunMetrics::total_delivered_kib() const {
    return std::accumulate(delivered_kib.begin(), delivered_kib.end(), 0.0);
}

std::size_t RunMetrics::completed_downloads() const {
    return static_cast<std::size_t>(std::count_if(downloads.begin(), downloads.end(),
                                                  [](const DownloadRecord& d) { return d.end_s.has_value(); }));
}

RelayHistories::RelayHistories(std::size_t n_relays, std::size_t capacity_buckets)
    : capacity_(capacity_buckets), per_relay_(n_relays) {}

void RelayHistories::add(RelayIndex relay, CircuitId circuit, std::int64_t bucket, double cells) {
    auto& m = per_relay_.at(relay);
    auto it = m.find(circuit);
    if (it == m.end()) it = m.emplace(circuit, CellHistory(capacity_)).first;
    it->second.add(bucket, cells);
}

std::vector<std::pair<CircuitId, std::vector<double>>> RelayHistories::windows(RelayIndex relay,
                                                                               std::int64_t now,
                                                                               std::size_t count) const {
    std::vector<std::pair<CircuitId, std::vector<double>>> out;
    for (const auto& [id, h] : per_relay_.at(relay)) {
        if (h.idle(now, count)) continue;
        out.emplace_back(id, h.window(now, count));
    }
    return out;
}

void RelayHistories::prune(std::int64_t now) {
    for (auto& m : per_relay_) {
        std::erase_if(m, [&](const auto& kv) { return kv.second.idle(now, capacity_); });
    }
}

CircuitSet build_client_circuits(const RelayTable& relays, std::size_t count, Rng& rng) {
    if (relays.size() < 3) throw Error("need at least three relays to build circuits");
    if (relays.exit_count() == 0) throw Error("no exit relays to build circuits");
    std::vector<double> exit_w(relays.size(), 0.0);
    for (RelayIndex i = 0; i < relays.size(); ++i) {
        if (relays[i].is_exit) exit_w[i] = relays[i].capacity;
    }
    CircuitSet out;
    out.kind = CircuitSetKind::original;
    for (std::size_t n = 0; n < count; ++n) {
        Circuit c;
        c.hops[2] = static_cast<RelayIndex>(rng.weighted_index(exit_w));
        std::vector<double> w = relays.capacities();
        w[c.hops[2]] = 0.0;
        c.hops[0] = static_cast<RelayIndex>(rng.weighted_index(w));
        w[c.hops[0]] = 0.0;
        c.hops[1] = static_cast<RelayIndex>(rng.weighted_index(w));
        out.circuits.push_back(c);
    }
    return out;
}

RelayTable make_relay_fixture(std::size_t n, std::size_t exits, double min_kibps, double max_kibps,
                              std::uint64_t seed) {
    Rng rng(seed);
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng.engine());
    std::vector<char> is_exit(n, 0);
    for (std::size_t i = 0; i < std::min(exits, n); ++i) is_exit[order[i]] = 1;

    std::vector<Relay> relays;
    const double lo = std::log(min_kibps);
    const double hi = std::log(max_kibps);
    for (std::size_t i = 0; i < n; ++i) {
        char id[32];
        std::snprintf(id, sizeof id, "r%03zu", i);
        const double cap = std::round(std::exp(rng.uniform(lo, hi)));
        relays.push_back({id, cap, is_exit[i] != 0});
    }
    return RelayTable(std::move(relays));
}

namespace {

struct Client {
    ClientId id = 0;
    ClientKind kind = ClientKind::web;
    double size_kib = 0.0;
    std::vector<Circuit> circuits;
    std::vector<CircuitId> circuit_ids;
    double next_start = 0.0;
    bool busy = false;
    DownloadId seq = 0;
    std::map<RelayIndex, double> view;  // last gossiped weights
};

struct Flow {
    std::size_t record = 0;  // index into metrics.downloads
    std::size_t client = 0;
    CircuitId circuit_id = 0;
    Circuit circuit;
    bool fixed = false;
    double remaining_kib = 0.0;  // sized mode
    double end_s = 0.0;          // fixed mode
};

class Simulation {
public:
    Simulation(const ExperimentConfig& cfg, const RunHooks& hooks)
        : cfg_(cfg),
          hooks_(hooks),
          rng_(cfg.seed),
          caps_(cfg.relays.capacities()),
          histories_(cfg.relays.size(),
                     static_cast<std::size_t>(std::llround(cfg.history_s / kBucketSeconds))) {
        track_weights_ = cfg.policy == PolicyKind::decentral_dwc || cfg.attack.has_value();
        track_history_ = track_weights_ || static_cast<bool>(hooks.on_central_probe);
        if (cfg.attack) target_ = cfg.relays.index_of(cfg.attack->target);
        local_weight_.assign(cfg.relays.size(), 0.0);
        local_bottlenecks_.assign(cfg.relays.size(), 0);
    }

    RunMetrics run() {
        metrics_.policy = std::string(to_string(cfg_.policy));
        metrics_.seed = cfg_.seed;
        metrics_.tick_s = cfg_.tick_s;
        metrics_.duration_s = cfg_.duration_s;
        metrics_.relays = cfg_.relays;

        if (cfg_.fixed_trace) {
            setup_fixed();
        } else {
            setup_sized();
        }

        const auto n_ticks = static_cast<std::int64_t>(std::ceil(cfg_.duration_s / cfg_.tick_s - kEps));
        std::int64_t last_second = -1;
        for (std::int64_t k = 0; k < n_ticks; ++k) {
            const double t = static_cast<double>(k) * cfg_.tick_s;
            const auto second = static_cast<std::int64_t>(std::floor(t + kEps));
            if (second != last_second) {
                last_second = second;
                on_second(t);
            }
            start_downloads(t);
            step(t);
        }
        return std::move(metrics_);
    }

private:
    void setup_sized() {
        const auto& mix = cfg_.clients;
        auto add = [&](ClientKind kind, std::size_t n, double size) {
            for (std::size_t i = 0; i < n; ++i) {
                Client c;
                c.id = static_cast<ClientId>(clients_.size());
                c.kind = kind;
                c.size_kib = size;
                clients_.push_back(std::move(c));
            }
        };
        add(ClientKind::web, mix.web, cfg_.model.web_size_kib);
        add(ClientKind::bulk, mix.bulk, cfg_.model.bulk_size_kib);
        add(ClientKind::perf_50k, mix.perf_50k, 50.0);
        add(ClientKind::perf_1m, mix.perf_1m, 1024.0);
        add(ClientKind::perf_5m, mix.perf_5m, 5120.0);
        for (auto& c : clients_) {
            auto set = build_client_circuits(cfg_.relays, cfg_.circuits_per_client, rng_);
            c.circuits = std::move(set.circuits);
            for (std::size_t j = 0; j < c.circuits.size(); ++j) {
                c.circuit_ids.push_back(static_cast<CircuitId>(c.id) * cfg_.circuits_per_client + j);
            }
            c.next_start = cfg_.model.start_spread_s > 0 ? rng_.uniform(0.0, cfg_.model.start_spread_s) : 0.0;
        }
    }

    void setup_fixed() {
        const auto& trace = *cfg_.fixed_trace;
        std::map<ClientId, std::size_t> index;
        const auto n = static_cast<CircuitId>(cfg_.relays.size());
        for (std::size_t i = 0; i < trace.downloads.size(); ++i) {
            const auto& d = trace.downloads[i];
            check_download(d);
            auto [it, fresh] = index.emplace(d.client, clients_.size());
            if (fresh) {
                Client c;
                c.id = d.client;
                c.kind = ClientKind::fixed;
                clients_.push_back(std::move(c));
            }
            auto& c = clients_[it->second];
            if (i < trace.original_sets.size()) {
                for (const auto& circ : trace.original_sets[i].circuits) {
                    if (std::find(c.circuits.begin(), c.circuits.end(), circ) != c.circuits.end()) continue;
                    c.circuits.push_back(circ);
                    c.circuit_ids.push_back((circ.hops[0] * n + circ.hops[1]) * n + circ.hops[2]);
                }
            }
            pending_fixed_.push_back(i);
        }
        std::sort(pending_fixed_.begin(), pending_fixed_.end(), [&](std::size_t a, std::size_t b) {
            const auto& da = trace.downloads[a];
            const auto& db = trace.downloads[b];
            if (da.interval().start_s != db.interval().start_s) return da.interval().start_s < db.interval().start_s;
            return da.id < db.id;
        });
        fixed_client_index_ = std::move(index);
    }

    CircuitId circuit_id_for(const Client& c, const Circuit& circ) const {
        for (std::size_t j = 0; j < c.circuits.size(); ++j) {
            if (c.circuits[j] == circ) return c.circuit_ids[j];
        }
        const auto n = static_cast<CircuitId>(cfg_.relays.size());
        return (circ.hops[0] * n + circ.hops[1]) * n + circ.hops[2];
    }

    bool attack_active(double t) const {
        if (!cfg_.attack) return false;
        if (t + kEps < cfg_.attack->start_s) return false;
        return !cfg_.attack->end_s || t + kEps < *cfg_.attack->end_s;
    }

    // Local weights, gossip delivery and the per-second target sample.
    void on_second(double t) {
        if (!track_weights_) return;
        const std::int64_t last_bucket = bucket_of(t) - 1;
        if (last_bucket >= 0) histories_.prune(last_bucket);
        const std::size_t window = cfg_.estimator.window_buckets();
        std::vector<CircuitHistoryView> views;
        for (RelayIndex r = 0; r < cfg_.relays.size(); ++r) {
            const auto w = histories_.windows(r, last_bucket, window);
            views.clear();
            for (const auto& [id, buckets] : w) views.push_back({id, buckets});
            const auto lw = local_weight(views, cfg_.estimator);
            local_weight_[r] = lw.weight;
            local_bottlenecks_[r] = lw.bottlenecks.size();
        }

        std::vector<char> sent(cfg_.relays.size(), 0);
        for (auto& c : clients_) {
            for (std::size_t j = 0; j < c.circuits.size(); ++j) {
                if (!gossip_due(c.circuit_ids[j], t)) continue;
                for (auto h : c.circuits[j].hops) {
                    c.view[h] = local_weight_[h];
                    sent[h] = 1;
                }
            }
        }
        std::vector<std::size_t> through(cfg_.relays.size(), 0);
        for (const auto& f : flows_) {
            for (auto h : f.circuit.hops) ++through[h];
        }
        if (attack_active(t)) through[target_] += cfg_.attack->flows;
        for (RelayIndex r = 0; r < cfg_.relays.size(); ++r) {
            if (!sent[r]) continue;
            metrics_.gossip.push_back({t, r, local_weight_[r], local_bottlenecks_[r], through[r]});
        }

        if (cfg_.attack) {
            TargetSample s;
            s.t = t;
            s.weight = local_weight_[target_];
            for (const auto& f : flows_) {
                if (f.circuit.contains(target_)) ++s.client_circuits;
            }
            s.completed = completed_via_target_;
            s.attack_kibps = last_attack_kibps_;
            completed_via_target_ = 0;
            metrics_.target.push_back(s);
        }
    }

    void probe(double t) {
        std::vector<FlowPath> paths;
        for (const auto& f : flows_) paths.push_back(FlowPath::of(f.circuit));
        const auto alloc = allocate_flows(paths, caps_, false);
        std::vector<std::size_t> counts(cfg_.relays.size(), 0);
        std::vector<char> active(cfg_.relays.size(), 0);
        for (std::size_t i = 0; i < flows_.size(); ++i) {
            ++counts[alloc.bottleneck_of[i]];
            for (auto h : flows_[i].circuit.hops) active[h] = 1;
        }
        ProbeContext ctx;
        ctx.t = t;
        ctx.last_bucket = bucket_of(t) - 1;
        ctx.central_counts = counts;
        ctx.relay_active = active;
        ctx.histories = &histories_;
        hooks_.on_central_probe(ctx);
    }

    std::size_t choose(Client& c, const std::vector<Circuit>& candidates, SelectionRecord& rec) {
        switch (cfg_.policy) {
            case PolicyKind::vanilla:
                return weighted_random_select(candidates, cfg_.relays, rng_);
            case PolicyKind::central_dwc: {
                std::vector<Circuit> active;
                active.reserve(flows_.size());
                for (const auto& f : flows_) active.push_back(f.circuit);
                auto d = select_circuit_dwc(candidates, active, cfg_.relays);
                for (const auto& circ : candidates) {
                    for (auto h : circ.hops) rec.weights[h] = d.relay_weights[h];
                }
                return d.index;
            }
            case PolicyKind::decentral_dwc: {
                for (const auto& circ : candidates) {
                    for (auto h : circ.hops) {
                        if (auto it = c.view.find(h); it != c.view.end()) rec.weights[h] = it->second;
                    }
                }
                return client_select(candidates, c.view, cfg_.relays, rng_);
            }
            case PolicyKind::ga:
                break;
        }
        throw Error("ga selection is resolved from the mapping");
    }

    void start_flow(Client& c, DownloadRecord rec, const std::vector<Circuit>& candidates,
                    std::optional<double> fixed_end, double t) {
        SelectionRecord sel;
        sel.download = rec.id;
        sel.client = c.id;
        sel.t = t;
        sel.candidates = candidates;
        if (cfg_.policy == PolicyKind::ga) {
            auto it = cfg_.mapping.find(rec.id);
            if (it == cfg_.mapping.end()) {
                throw Error("ga mapping has no circuit for download " + std::to_string(rec.id));
            }
            auto pos = std::find(sel.candidates.begin(), sel.candidates.end(), it->second);
            if (pos == sel.candidates.end()) {
                sel.candidates.push_back(it->second);
                pos = sel.candidates.end() - 1;
            }
            sel.chosen = static_cast<std::size_t>(pos - sel.candidates.begin());
        } else {
            if (candidates.empty()) throw Error("client " + std::to_string(c.id) + " has no circuits");
            sel.chosen = choose(c, candidates, sel);
        }
        rec.circuit = sel.candidates[sel.chosen];

        Flow f;
        f.record = metrics_.downloads.size();
        f.client = static_cast<std::size_t>(&c - clients_.data());
        f.circuit = rec.circuit;
        f.circuit_id = circuit_id_for(c, rec.circuit);
        if (fixed_end) {
            f.fixed = true;
            f.end_s = *fixed_end;
        } else {
            f.remaining_kib = rec.size_kib;
        }
        metrics_.downloads.push_back(std::move(rec));
        metrics_.selections.push_back(std::move(sel));
        flows_.push_back(f);
        c.busy = true;
    }

    void start_downloads(double t) {
        bool probed = false;
        auto maybe_probe = [&] {
            if (probed || !hooks_.on_central_probe || cfg_.policy != PolicyKind::central_dwc) return;
            probed = true;
            probe(t);
        };

        if (cfg_.fixed_trace) {
            const auto& trace = *cfg_.fixed_trace;
            while (next_fixed_ < pending_fixed_.size()) {
                const std::size_t i = pending_fixed_[next_fixed_];
                const auto& d = trace.downloads[i];
                if (d.interval().start_s > t + kEps) break;
                ++next_fixed_;
                if (d.interval().end_s + kEps < t) continue;  // fell between ticks
                maybe_probe();
                auto& c = clients_[fixed_client_index_.at(d.client)];
                DownloadRecord rec;
                rec.id = d.id;
                rec.client = d.client;
                rec.kind = ClientKind::fixed;
                rec.start_s = t;
                std::vector<Circuit> candidates;
                if (i < trace.original_sets.size()) candidates = trace.original_sets[i].circuits;
                start_flow(c, std::move(rec), candidates, d.interval().end_s, t);
            }
            return;
        }

        for (auto& c : clients_) {
            if (c.busy || c.next_start > t + kEps) continue;
            maybe_probe();
            DownloadRecord rec;
            rec.id = static_cast<DownloadId>(c.id) * kDownloadsPerClient + c.seq++;
            rec.client = c.id;
            rec.kind = c.kind;
            rec.size_kib = c.size_kib;
            rec.start_s = t;
            start_flow(c, std::move(rec), c.circuits, std::nullopt, t);
        }
    }

    double pause_after(const Client& c) {
        switch (c.kind) {
            case ClientKind::web:
                return rng_.uniform(cfg_.model.web_pause_min_ms, cfg_.model.web_pause_max_ms) / 1000.0;
            case ClientKind::perf_50k:
            case ClientKind::perf_1m:
            case ClientKind::perf_5m:
                return cfg_.model.perf_pause_ms / 1000.0;
            default:
                return 0.0;
        }
    }

    void record_cells(const FlowPath& path, CircuitId id, double t, double rate_kibps, double kib) {
        if (!track_history_ || kib <= 0.0) return;
        const std::int64_t first = bucket_of(t);
        const std::int64_t last = bucket_of(t + cfg_.tick_s);
        double left = kib * kCellsPerKiB;
        const double per_bucket = rate_kibps * kCellsPerKiB * kBucketSeconds;
        for (std::int64_t b = first; b < last && left > 0.0; ++b) {
            const double cells = std::min(left, per_bucket);
            left -= cells;
            for (auto r : path.relays()) histories_.add(r, id, b, cells);
        }
    }

    void step(double t) {
        const bool attacking = attack_active(t);
        std::vector<FlowPath> paths;
        paths.reserve(flows_.size() + (attacking ? cfg_.attack->flows : 0));
        for (const auto& f : flows_) paths.push_back(FlowPath::of(f.circuit));
        if (attacking) {
            for (std::size_t i = 0; i < cfg_.attack->flows; ++i) paths.push_back(FlowPath::one_hop(target_));
        }
        const auto alloc = allocate_flows(paths, caps_, false);

        double client_bw = 0.0;
        double delivered = 0.0;
        std::vector<std::size_t> finished;
        for (std::size_t i = 0; i < flows_.size(); ++i) {
            auto& f = flows_[i];
            auto& rec = metrics_.downloads[f.record];
            const double a = alloc.circuit_bw[i];
            client_bw += a;
            if (a > 0.0 && !rec.first_byte_s) rec.first_byte_s = t;
            double moved = a * cfg_.tick_s;
            bool done = false;
            if (f.fixed) {
                done = t + cfg_.tick_s > f.end_s + kEps;
                if (done) rec.end_s = f.end_s;
            } else if (a > 0.0 && f.remaining_kib <= moved) {
                moved = f.remaining_kib;
                rec.end_s = t + f.remaining_kib / a;
                done = true;
            }
            if (!f.fixed) f.remaining_kib -= moved;
            rec.delivered_kib = done && !f.fixed ? rec.size_kib : rec.delivered_kib + moved;
            delivered += moved;
            record_cells(paths[i], f.circuit_id, t, a, moved);
            if (done) finished.push_back(i);
        }
        double attack_bw = 0.0;
        for (std::size_t i = flows_.size(); i < paths.size(); ++i) {
            attack_bw += alloc.circuit_bw[i];
            record_cells(paths[i], kAttackCircuitBase + (i - flows_.size()), t, alloc.circuit_bw[i],
                         alloc.circuit_bw[i] * cfg_.tick_s);
        }
        last_attack_kibps_ = attack_bw;

        std::vector<double> util(cfg_.relays.size());
        for (std::size_t r = 0; r < util.size(); ++r) util[r] = (caps_[r] - alloc.residual[r]) / caps_[r];
        metrics_.tick_time.push_back(t);
        metrics_.client_bw_kibps.push_back(client_bw);
        metrics_.delivered_kib.push_back(delivered);
        metrics_.utilization.push_back(std::move(util));

        for (auto it = finished.rbegin(); it != finished.rend(); ++it) {
            const auto& f = flows_[*it];
            auto& c = clients_[f.client];
            const auto& rec = metrics_.downloads[f.record];
            if (cfg_.attack && f.circuit.contains(target_)) ++completed_via_target_;
            c.busy = false;
            if (!f.fixed) c.next_start = *rec.end_s + pause_after(c);
            flows_.erase(flows_.begin() + static_cast<std::ptrdiff_t>(*it));
        }
    }

    const ExperimentConfig& cfg_;
    const RunHooks& hooks_;
    Rng rng_;
    std::vector<double> caps_;
    RelayHistories histories_;
    bool track_weights_ = false;
    bool track_history_ = false;
    RelayIndex target_ = 0;
    std::vector<double> local_weight_;
    std::vector<std::size_t> local_bottlenecks_;
    std::size_t completed_via_target_ = 0;
    double last_attack_kibps_ = 0.0;

    std::vector<Client> clients_;
    std::vector<Flow> flows_;
    std::vector<std::size_t> pending_fixed_;
    std::size_t next_fixed_ = 0;
    std::map<ClientId, std::size_t> fixed_client_index_;
    RunMetrics metrics_;
};

}  // namespace

RunMetrics run(const ExperimentConfig& config, const RunHooks& hooks) {
    config.validate();
    return Simulation(config, hooks).run();
}

ExtractedTrace extract_fixed_trace(const RunMetrics& metrics) {
    ExtractedTrace out;
    out.trace.relays = metrics.relays;
    std::map<DownloadId, const SelectionRecord*> sel;
    for (const auto& s : metrics.selections) sel[s.download] = &s;
    for (const auto& d : metrics.downloads) {
        if (!d.end_s) {
            ++out.dropped;
            continue;
        }
        Download fd;
        fd.id = d.id;
        fd.client = d.client;
        fd.mode = FixedInterval{d.start_s, *d.end_s};
        fd.circuit = d.circuit;
        CircuitSet set;
        set.kind = CircuitSetKind::original;
        if (auto it = sel.find(d.id); it != sel.end()) set.circuits = it->second->candidates;
        out.trace.downloads.push_back(std::move(fd));
        out.trace.original_sets.push_back(std::move(set));
    }
    return out;
}

}  // namespace poa

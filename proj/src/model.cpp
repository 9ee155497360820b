#include "poa/model.hpp"

#include <algorithm>

#include "poa/error.hpp"

namespace poa {

RelayTable::RelayTable(std::vector<Relay> relays) : relays_(std::move(relays)) {
    std::sort(relays_.begin(), relays_.end(),
              [](const Relay& a, const Relay& b) { return a.id < b.id; });
    for (std::size_t i = 0; i < relays_.size(); ++i) {
        const auto& r = relays_[i];
        if (!(r.capacity > 0.0)) {
            throw ConfigError("relays[" + r.id + "].capacity_kibps", "capacity must be positive");
        }
        if (!by_id_.emplace(r.id, static_cast<RelayIndex>(i)).second) {
            throw ConfigError("relays[" + r.id + "].id", "duplicate relay id");
        }
    }
}

const Relay& RelayTable::at(RelayIndex i) const {
    if (i >= relays_.size()) {
        throw LookupError("relay index " + std::to_string(i) + " out of range");
    }
    return relays_[i];
}

RelayIndex RelayTable::index_of(std::string_view id) const {
    auto idx = find(id);
    if (!idx) throw LookupError("unknown relay id '" + std::string(id) + "'");
    return *idx;
}

std::optional<RelayIndex> RelayTable::find(std::string_view id) const {
    auto it = by_id_.find(std::string(id));
    if (it == by_id_.end()) return std::nullopt;
    return it->second;
}

std::vector<double> RelayTable::capacities() const {
    std::vector<double> out;
    out.reserve(relays_.size());
    for (const auto& r : relays_) out.push_back(r.capacity);
    return out;
}

std::size_t RelayTable::exit_count() const {
    return static_cast<std::size_t>(
        std::count_if(relays_.begin(), relays_.end(), [](const Relay& r) { return r.is_exit; }));
}

bool same_relays(const Circuit& a, const Circuit& b) {
    auto x = a.hops;
    auto y = b.hops;
    std::sort(x.begin(), x.end());
    std::sort(y.begin(), y.end());
    return x == y;
}

double min_capacity(const Circuit& c, const RelayTable& relays) {
    return std::min({relays.at(c.hops[0]).capacity, relays.at(c.hops[1]).capacity,
                     relays.at(c.hops[2]).capacity});
}

bool validate_circuit(const Circuit& c, const RelayTable& relays) {
    for (auto h : c.hops) relays.at(h);
    const auto& [g, m, e] = c.hops;
    if (g == m || m == e || g == e) return false;
    return relays[e].is_exit;
}

const FixedInterval& Download::interval() const {
    if (const auto* f = std::get_if<FixedInterval>(&mode)) return *f;
    throw Error("download " + std::to_string(id) + " is not fixed-mode");
}

void check_download(const Download& d) {
    if (const auto* f = std::get_if<FixedInterval>(&d.mode)) {
        if (!(f->start_s < f->end_s)) {
            throw ConfigError("downloads[" + std::to_string(d.id) + "]", "start must precede end");
        }
    } else {
        const auto& s = std::get<SizedTransfer>(d.mode);
        if (!(s.size_kib > 0.0)) {
            throw ConfigError("downloads[" + std::to_string(d.id) + "]", "size must be positive");
        }
    }
}

std::string_view to_string(CircuitSetKind k) {
    switch (k) {
        case CircuitSetKind::original: return "original";
        case CircuitSetKind::full: return "full";
        case CircuitSetKind::pruned: return "pruned";
    }
    return "?";
}

CircuitSetKind parse_circuit_set_kind(std::string_view s) {
    if (s == "original") return CircuitSetKind::original;
    if (s == "full") return CircuitSetKind::full;
    if (s == "pruned") return CircuitSetKind::pruned;
    throw ConfigError("circuits", "unknown circuit set '" + std::string(s) + "'");
}

CircuitSet build_full_set(const RelayTable& relays) {
    CircuitSet out;
    out.kind = CircuitSetKind::full;
    const auto n = static_cast<RelayIndex>(relays.size());
    if (n < 3 || relays.exit_count() == 0) {
        out.degenerate = true;
        return out;
    }
    // Descending capacity, ties by index.
    auto before = [&](RelayIndex a, RelayIndex b) {
        if (relays[a].capacity != relays[b].capacity) return relays[a].capacity > relays[b].capacity;
        return a < b;
    };
    for (RelayIndex i = 0; i < n; ++i) {
        for (RelayIndex j = i + 1; j < n; ++j) {
            for (RelayIndex k = j + 1; k < n; ++k) {
                std::array<RelayIndex, 3> s{i, j, k};
                std::sort(s.begin(), s.end(), before);
                // Last exit-capable member in descending order is the lowest-capacity exit.
                int exit_pos = -1;
                for (int p = 2; p >= 0; --p) {
                    if (relays[s[p]].is_exit) {
                        exit_pos = p;
                        break;
                    }
                }
                if (exit_pos < 0) continue;
                Circuit c;
                c.hops[2] = s[exit_pos];
                int slot = 0;
                for (int p = 0; p < 3; ++p) {
                    if (p != exit_pos) c.hops[slot++] = s[p];
                }
                out.circuits.push_back(c);
            }
        }
    }
    return out;
}

CircuitSet build_pruned_set(const RelayTable& relays) {
    CircuitSet out;
    out.kind = CircuitSetKind::pruned;

    struct Live {
        RelayIndex index;
        double bw;
        bool is_exit;
    };
    std::vector<Live> live;
    for (RelayIndex i = 0; i < relays.size(); ++i) {
        live.push_back({i, relays[i].capacity, relays[i].is_exit});
    }

    auto pick = [&](bool want_exit, std::initializer_list<RelayIndex> taken) -> std::optional<std::size_t> {
        std::optional<std::size_t> best;
        for (std::size_t i = 0; i < live.size(); ++i) {
            const auto& r = live[i];
            if (r.is_exit != want_exit) continue;
            if (std::find(taken.begin(), taken.end(), r.index) != taken.end()) continue;
            if (!best || r.bw > live[*best].bw) best = i;  // ascending scan keeps lowest id on ties
        }
        return best;
    };
    constexpr RelayIndex none = ~RelayIndex{0};

    while (live.size() >= 3) {
        auto exit = pick(true, {});
        if (!exit) break;
        const RelayIndex e = live[*exit].index;

        auto middle = pick(false, {});
        if (!middle) middle = pick(true, {e});
        if (!middle) break;
        const RelayIndex m = live[*middle].index;

        auto guard = pick(false, {m});
        if (!guard) guard = pick(true, {e, m});
        if (!guard) break;
        const RelayIndex g = live[*guard].index;

        out.circuits.push_back(Circuit{{g, m, e}});
        const double bw = std::min({live[*guard].bw, live[*middle].bw, live[*exit].bw});
        for (auto idx : {*guard, *middle, *exit}) {
            live[idx].bw -= bw;
            if (live[idx].bw <= 0.0) {
                live[idx].bw = 0.0;
                live[idx].index = none;
            }
        }
        std::erase_if(live, [&](const Live& r) { return r.index == none; });
    }
    out.degenerate = out.circuits.empty();
    return out;
}

std::map<DownloadId, CircuitSet> extract_original_sets(std::span<const SelectionRecord> log) {
    if (log.empty()) throw Error("selection log is empty");
    std::map<DownloadId, CircuitSet> out;
    for (const auto& rec : log) {
        CircuitSet set;
        set.kind = CircuitSetKind::original;
        set.circuits = rec.candidates;
        out[rec.download] = std::move(set);
    }
    return out;
}

CircuitSet original_set_for(std::span<const SelectionRecord> log, DownloadId id) {
    if (log.empty()) throw Error("selection log is empty");
    for (const auto& rec : log) {
        if (rec.download == id) {
            CircuitSet set;
            set.circuits = rec.candidates;
            return set;
        }
    }
    throw LookupError("download " + std::to_string(id) + " not in selection log");
}

}  // namespace poa

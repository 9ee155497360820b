#include "poa/genetic.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "poa/bandwidth.hpp"
#include "poa/error.hpp"

namespace poa {

void GaParams::validate() const {
    if (population < 2) throw ConfigError("population", "must be at least 2");
    if (!(breed_pct > 0.0 && breed_pct <= 1.0)) throw ConfigError("breed_pct", "must lie in (0, 1]");
    if (!(elite_pct >= 0.0 && elite_pct < 1.0)) throw ConfigError("elite_pct", "must lie in [0, 1)");
    if (!(mutation_prob >= 0.0 && mutation_prob <= 1.0)) {
        throw ConfigError("mutation_prob", "must lie in [0, 1]");
    }
    if (!(tick_s > 0.0)) throw ConfigError("tick_s", "must be positive");
}

std::size_t GaParams::elite_count() const {
    const auto n = static_cast<std::size_t>(std::llround(elite_pct * static_cast<double>(population)));
    return std::min(population, std::max<std::size_t>(1, n));
}

std::size_t GaParams::breed_stratum() const {
    const auto n = static_cast<std::size_t>(std::llround(breed_pct * static_cast<double>(population)));
    return std::min(population, std::max<std::size_t>(2, n));
}

Solution breed(const Solution& a, const Solution& b, Rng& rng) {
    if (a.assignment.size() != b.assignment.size()) {
        throw Error("parents cover different download sets");
    }
    Solution child;
    child.assignment.reserve(a.assignment.size());
    for (std::size_t i = 0; i < a.assignment.size(); ++i) {
        child.assignment.push_back(rng.coin() ? a.assignment[i] : b.assignment[i]);
    }
    return child;
}

namespace {

const Circuit* find_member(const CircuitSet& set, const Circuit& c) {
    for (const auto& m : set.circuits) {
        if (same_relays(m, c)) return &m;
    }
    return nullptr;
}

}  // namespace

Solution mutate(const Solution& s, double m, std::span<const CircuitSet> candidates,
                const RelayTable& relays, Rng& rng) {
    Solution out{s.assignment, std::nullopt};
    if (m <= 0.0) {
        out.fitness = s.fitness;
        return out;
    }
    std::vector<Circuit> options;
    for (std::size_t i = 0; i < out.assignment.size(); ++i) {
        if (!rng.chance(m)) continue;
        const Circuit current = out.assignment[i];
        const auto pos = rng.index(3);
        options.clear();
        for (RelayIndex r = 0; r < relays.size(); ++r) {
            if (current.contains(r)) continue;
            Circuit alt = current;
            alt.hops[pos] = r;
            if (!validate_circuit(alt, relays)) continue;
            if (i < candidates.size()) {
                const Circuit* member = find_member(candidates[i], alt);
                if (!member) continue;
                options.push_back(*member);
            } else {
                options.push_back(alt);
            }
        }
        if (!options.empty()) out.assignment[i] = options[rng.index(options.size())];
    }
    return out;
}

double evaluate(const Solution& s, const Trace& trace, double tick_s) {
    if (s.assignment.size() != trace.downloads.size()) {
        throw Error("solution does not cover the trace");
    }
    std::vector<ScheduledDownload> schedule;
    schedule.reserve(s.assignment.size());
    for (std::size_t i = 0; i < s.assignment.size(); ++i) {
        const auto& iv = trace.downloads[i].interval();
        schedule.push_back({iv.start_s, iv.end_s, s.assignment[i]});
    }
    return calc_total_bw(schedule, tick_s, trace.relays);
}

namespace {

std::vector<std::size_t> rank_by_fitness(std::span<const Solution> pop) {
    std::vector<std::size_t> order(pop.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return *pop[a].fitness > *pop[b].fitness;
    });
    return order;
}

}  // namespace

std::vector<Solution> evolve(std::span<const Solution> population, const GaParams& params,
                             const Trace& trace, std::span<const CircuitSet> candidates, Rng& rng) {
    for (std::size_t i = 0; i < population.size(); ++i) {
        if (!population[i].fitness) {
            throw Error("population member " + std::to_string(i) + " has not been evaluated");
        }
    }
    const auto order = rank_by_fitness(population);
    const std::size_t size = population.size();
    const std::size_t elites = std::min(size, params.elite_count());
    const std::size_t stratum = std::min(size, params.breed_stratum());

    std::vector<Solution> next;
    next.reserve(size);
    for (std::size_t i = 0; i < elites; ++i) next.push_back(population[order[i]]);
    while (next.size() < size) {
        const auto& a = population[order[rng.index(stratum)]];
        const auto& b = population[order[rng.index(stratum)]];
        Solution child = mutate(breed(a, b, rng), params.mutation_prob, candidates, trace.relays, rng);
        child.fitness = evaluate(child, trace, params.tick_s);
        next.push_back(std::move(child));
    }
    return next;
}

GaResult run_genetic(const Trace& trace, std::span<const CircuitSet> candidates,
                     const GaParams& params) {
    params.validate();
    if (candidates.size() != trace.downloads.size()) {
        throw Error("candidate sets do not match the trace");
    }
    for (std::size_t i = 0; i < candidates.size(); ++i) {
        if (candidates[i].empty()) {
            throw Error("download " + std::to_string(trace.downloads[i].id) + " has no candidate circuits");
        }
    }
    Rng rng(params.seed);

    std::vector<Solution> pop(params.population);
    for (auto& s : pop) {
        s.assignment.reserve(candidates.size());
        for (const auto& set : candidates) s.assignment.push_back(set.circuits[rng.index(set.size())]);
        s.fitness = evaluate(s, trace, params.tick_s);
    }

    GaResult result;
    auto track = [&](std::span<const Solution> p) {
        for (const auto& s : p) {
            if (!result.best.fitness || *s.fitness > *result.best.fitness) result.best = s;
        }
        result.best_fitness_history.push_back(*result.best.fitness);
    };
    track(pop);
    for (std::size_t g = 0; g < params.generations; ++g) {
        pop = evolve(pop, params, trace, candidates, rng);
        track(pop);
    }
    return result;
}

Assignment to_assignment(const Solution& s, const Trace& trace) {
    Assignment out;
    for (std::size_t i = 0; i < s.assignment.size() && i < trace.downloads.size(); ++i) {
        out[trace.downloads[i].id] = s.assignment[i];
    }
    return out;
}

}  // namespace poa

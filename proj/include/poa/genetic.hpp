#pragma once

// Offline genetic search over download -> circuit mappings, scored by the
// total bandwidth the mapping would push through the network.

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "poa/model.hpp"
#include "poa/rng.hpp"

namespace poa {

/// A complete mapping, one circuit per trace download (same order as the trace).
struct Solution {
    std::vector<Circuit> assignment;
    std::optional<double> fitness;
};

struct GaParams {
    std::size_t population = 20;
    std::size_t generations = 50;
    double breed_pct = 0.2;
    double elite_pct = 0.1;
    double mutation_prob = 0.0;
    std::uint64_t seed = 1;
    double tick_s = 1.0;

    /// Throws ConfigError on out-of-range values.
    void validate() const;
    std::size_t elite_count() const;
    std::size_t breed_stratum() const;
};

/// Per download, takes either parent's circuit with probability one half.
/// Throws Error if the parents cover different numbers of downloads.
Solution breed(const Solution& a, const Solution& b, Rng& rng);

/// Per download, with probability m replaces the relay at a uniformly chosen
/// position with a uniformly chosen relay, restricted to replacements that
/// keep the circuit valid and inside that download's candidate set. Leaves
/// the download unchanged when no such replacement exists.
Solution mutate(const Solution& s, double m, std::span<const CircuitSet> candidates,
                const RelayTable& relays, Rng& rng);

/// Fitness of a solution against the trace's download intervals.
double evaluate(const Solution& s, const Trace& trace, double tick_s);

/// One generation: elites copied, the rest bred from the top stratum and
/// mutated, children evaluated. Throws Error if any member is unevaluated.
std::vector<Solution> evolve(std::span<const Solution> population, const GaParams& params,
                             const Trace& trace, std::span<const CircuitSet> candidates, Rng& rng);

struct GaResult {
    Solution best;
    std::vector<double> best_fitness_history;  // index 0 is the initial population
};

/// Throws Error naming the first download with an empty candidate set.
GaResult run_genetic(const Trace& trace, std::span<const CircuitSet> candidates,
                     const GaParams& params);

/// Converts a trace-ordered solution into an id-keyed assignment.
Assignment to_assignment(const Solution& s, const Trace& trace);

}  // namespace poa

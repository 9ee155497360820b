#pragma once

// Privacy analyses: bottleneck-estimate error, lying relays, weight leakage
// and the bandwidth-saturation denial of service.

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "poa/model.hpp"
#include "poa/rng.hpp"
#include "poa/sim.hpp"

namespace poa {

struct BottleneckObservation {
    double t = 0.0;
    RelayIndex relay = 0;
    double count = 0.0;
};

struct EstimatePair {
    double local = 0.0;
    double central = 0.0;
};

/// Pairs each central observation with the local observation of the same
/// relay closest in time, provided it lies within `slack_s`.
std::vector<EstimatePair> pair_observations(std::span<const BottleneckObservation> local,
                                            std::span<const BottleneckObservation> central,
                                            double slack_s = 0.0);

/// Mean of (local - central)^2. Throws Error when there are no pairs.
double mse_bottlenecks(std::span<const EstimatePair> pairs);

/// A uniform draw from the pooled central estimates. Throws Error on an empty pool.
double weighted_random_estimator(std::span<const double> central_pool, Rng& rng);

/// MSE of the weighted-random estimator against the central values, drawing
/// `draws_per_pair` estimates per pair.
double weighted_random_mse(std::span<const double> central, Rng& rng, std::size_t draws_per_pair = 1);

struct RelayShare {
    RelayIndex relay = 0;
    double before = 0.0;  // fraction of decisions whose chosen circuit contains the relay
    double after = 0.0;
    double delta() const { return after - before; }
};

struct LyingResult {
    std::vector<RelayShare> shares;  // one per relay
    std::vector<double> delta_cdf;   // sorted per-relay deltas
    std::size_t changed_decisions = 0;
};

/// Replays each logged decision with the liar's gossiped weight forced to 0.
/// A decision keeps its logged choice while that choice remains among the
/// lowest-weight, highest-capacity candidates; otherwise it moves to the first
/// such candidate.
LyingResult lying_relay_reselect(std::span<const SelectionRecord> log, RelayIndex liar,
                                 const RelayTable& relays);

struct WeightDelta {
    RelayIndex relay = 0;
    double t = 0.0;
    double d_weight = 0.0;
    double d_bottlenecks = 0.0;
};

struct CorrelationReport {
    std::vector<WeightDelta> pairs;
    double pearson = 0.0;
    double spearman = 0.0;
};

/// Consecutive-gossip deltas per relay; pairs with no weight change are dropped.
CorrelationReport weight_correlation(std::span<const GossipRecord> gossip);

double pearson(std::span<const double> x, std::span<const double> y);
double spearman(std::span<const double> x, std::span<const double> y);

struct DosReport {
    std::string policy;
    double n_squared_over_bw = 0.0;  // in 1/(cells/s)
    double steady_weight = 0.0;      // mean target weight once all flows are saturating
    std::size_t completed_before = 0;  // downloads via target before the attack
    std::size_t completed_during = 0;  // ... during the steady attack window
    std::vector<TargetSample> series;
};

/// Injects `n_onehop` saturating single-hop flows through `target` from
/// `attack_start_s` on and summarizes the target's weight and usage.
/// `settle_s` after the start is excluded from the steady-state window.
DosReport run_dos(ExperimentConfig config, const std::string& target, std::size_t n_onehop,
                  double attack_start_s, double settle_s);

}  // namespace poa

#pragma once

// Run summaries, cross-run comparison and the estimator accuracy sweep.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "poa/decentralized.hpp"
#include "poa/sim.hpp"

namespace poa::report {

/// Exact median (mean of the two middle values for even sizes).
/// Empty input gives nullopt.
std::optional<double> median(std::vector<double> values);

/// Empirical quantiles at p = 0, 1/(points-1), ..., 1 with linear
/// interpolation between order statistics. Empty input gives an empty result.
std::vector<double> quantiles(std::vector<double> values, std::size_t points = 1000);

/// Samples a run contributes to each comparable distribution.
struct RunSamples {
    std::vector<double> total_bw_kibps;  // per tick
    std::vector<double> web_time_s;      // completed web downloads
    std::vector<double> bulk_time_s;     // completed bulk downloads
    std::vector<double> ttfb_s;          // first tick with positive allocation
    std::vector<double> utilization;     // per relay, mean over ticks
};

/// Collects the samples of `m` restricted to t <= horizon_s.
RunSamples collect_samples(const RunMetrics& m, double horizon_s);

struct RunSummary {
    std::optional<double> median_total_bw_kibps;
    std::optional<double> median_web_s;
    std::optional<double> median_bulk_s;
    std::optional<double> median_ttfb_s;
    std::optional<double> median_utilization;
    std::size_t downloads = 0;
    std::size_t completed = 0;
};

RunSummary summarize(const RunMetrics& m);
RunSummary summarize(const RunSamples& s, std::size_t downloads, std::size_t completed);

/// One-line human-readable summary.
std::string summary_line(const RunSummary& s);

inline const std::vector<std::string>& metric_names() {
    static const std::vector<std::string> names = {"total_bw_kibps", "web_time_s", "bulk_time_s", "ttfb_s",
                                                   "utilization"};
    return names;
}

struct MetricDelta {
    std::string metric;
    std::size_t run = 0;
    std::optional<double> base;
    std::optional<double> value;
    std::optional<double> percent;  // relative to the first run's median
};

struct Comparison {
    std::vector<std::string> labels;
    double horizon_s = 0.0;
    std::vector<RunSummary> summaries;
    std::vector<MetricDelta> deltas;
    std::vector<std::string> warnings;
    /// [metric][run] -> quantile curve.
    std::vector<std::vector<std::vector<double>>> cdfs;
};

/// Aligns runs on the shortest duration and reports per-metric quantile
/// curves and percent deltas at the median against the first run. Runs of
/// unequal duration are truncated with a warning. Throws Error with fewer
/// than one run.
Comparison compare_runs(const std::vector<RunMetrics>& runs, const std::vector<std::string>& labels,
                        std::size_t cdf_points = 1000);

struct SweepCell {
    ClusterMethod method = ClusterMethod::head_tail;
    int granularity_ms = 100;
    double window_s = 1.0;
    double mse = 0.0;
    std::size_t pairs = 0;
};

struct SweepOptions {
    std::vector<ClusterMethod> methods = {ClusterMethod::jenks_two, ClusterMethod::jenks_best,
                                          ClusterMethod::head_tail, ClusterMethod::kde};
    std::vector<int> granularities_ms = {100, 1000};
    std::vector<double> windows_s = {1.0, 2.0, 5.0, 10.0};
    double tau = 0.9;
    double threshold = 0.4;
    double probe_interval_s = 1.0;  // minimum spacing between probes
    std::size_t baseline_draws = 100;
    std::uint64_t baseline_seed = 1;
};

struct SweepResult {
    std::vector<SweepCell> cells;  // method-major, then granularity, then window
    double baseline_mse = 0.0;
    std::size_t baseline_pairs = 0;
    std::size_t probes = 0;

    const SweepCell& cell(ClusterMethod m, int granularity_ms, double window_s) const;
};

/// Runs `config` under central_dwc at 100 ms ticks and, at each probe,
/// compares every relay's local bottleneck count for each estimator setting
/// with the central count. Also scores the weighted-random baseline.
/// Throws Error when no observations were paired.
SweepResult run_sweep(ExperimentConfig config, const SweepOptions& options = {});

}  // namespace poa::report

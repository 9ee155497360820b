#pragma once

// One-dimensional clustering used to separate bottleneck circuits from the rest.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace poa {

using CircuitId = std::uint64_t;

struct CircuitSample {
    CircuitId id = 0;
    double bw = 0.0;
};

struct JenksResult {
    /// Class boundaries b_1 .. b_{n+1}: b_1 is the minimum, b_k (k <= n) the
    /// first value of class k, b_{n+1} the maximum.
    std::vector<double> breaks;
    /// Index into the sorted data where each class starts (size n).
    std::vector<std::size_t> class_start;
    double sdcm = 0.0;  // within-class squared deviations
    double sdam = 0.0;  // squared deviations from the global mean
    double gvf = 0.0;   // (sdam - sdcm) / sdam, defined as 1 when sdam == 0
};

/// Optimal partition of sorted data into n contiguous classes minimizing the
/// within-class sum of squared deviations. Throws Error if n is 0 or exceeds
/// the number of values, or if data is unsorted.
JenksResult jenks_breaks(std::span<const double> sorted, std::size_t n_classes);

/// Ids of the circuits in the upper of two Jenks classes. Fewer than two
/// circuits, or zero variance, flags everything.
std::vector<CircuitId> cluster_jenks_two(std::span<const CircuitSample> samples);

/// Raises the class count from 2 until the GVF reaches tau (or every value
/// is its own class) and flags the top class.
std::vector<CircuitId> cluster_jenks_best(std::span<const CircuitSample> samples, double tau);

/// Recursive mean split: keeps the head (values >= mean) and recurses while
/// the head is a smaller fraction of the data than `threshold`.
std::vector<CircuitId> cluster_head_tail(std::span<const CircuitSample> samples, double threshold);

/// Value form of the head/tail recursion, returning the final head.
std::vector<double> head_tail(std::span<const double> data, double threshold);

struct KdeOptions {
    std::size_t grid_points = 512;
    double grid_headroom = 1.05;
    int max_halvings = 20;
};

struct KdeResult {
    std::vector<double> minima;  // local density minima, ascending
    double kernel_bandwidth = 0.0;
    int halvings = 0;
    bool fallback = false;  // no multimodal density found; mean split used
    double cut = 0.0;       // circuits strictly above this are flagged (>= in fallback)
};

/// Gaussian KDE over the pooled samples on a fixed grid; the kernel
/// bandwidth starts at sqrt(mean) and halves until a local minimum appears.
KdeResult kde_split(std::span<const double> pooled, const KdeOptions& opts = {});

/// Gaussian kernel density (unnormalized sum of kernels) at x.
double kde_density(std::span<const double> pooled, double bandwidth, double x);

/// Flags circuits above the largest density minimum of the pooled history
/// samples; falls back to circuits at or above the pooled mean.
std::vector<CircuitId> cluster_kde(std::span<const double> pooled,
                                   std::span<const CircuitSample> current,
                                   const KdeOptions& opts = {});

}  // namespace poa

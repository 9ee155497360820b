#include "poa/clustering.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "poa/error.hpp"

namespace poa {

JenksResult jenks_breaks(std::span<const double> sorted, std::size_t n_classes) {
    const std::size_t n = sorted.size();
    if (n_classes == 0) throw Error("jenks: class count must be positive");
    if (n_classes > n) throw Error("jenks: more classes than values");
    if (!std::is_sorted(sorted.begin(), sorted.end())) throw Error("jenks: data must be sorted");

    constexpr double inf = std::numeric_limits<double>::infinity();
    // cost[c][i]: best SDCM for the first i+1 values split into c+1 classes.
    std::vector<std::vector<double>> cost(n_classes, std::vector<double>(n, inf));
    std::vector<std::vector<std::size_t>> start(n_classes, std::vector<std::size_t>(n, 0));

    for (std::size_t i = 0; i < n; ++i) {
        // Walk the last class's first index j down from i, growing the class
        // by one value at the front with a Welford update.
        double mean = 0.0;
        double m2 = 0.0;
        std::size_t count = 0;
        for (std::size_t j = i + 1; j-- > 0;) {
            const double x = sorted[j];
            ++count;
            const double delta = x - mean;
            mean += delta / static_cast<double>(count);
            m2 += delta * (x - mean);
            if (j == 0) {
                cost[0][i] = m2;
                start[0][i] = 0;
            }
            const std::size_t max_c = std::min(n_classes - 1, j);
            for (std::size_t c = 1; c <= max_c; ++c) {
                const double prev = cost[c - 1][j - 1];
                if (prev == inf) continue;
                const double total = prev + m2;
                if (total < cost[c][i]) {
                    cost[c][i] = total;
                    start[c][i] = j;
                }
            }
        }
    }

    JenksResult out;
    out.sdcm = cost[n_classes - 1][n - 1];
    out.class_start.assign(n_classes, 0);
    std::size_t end = n - 1;
    for (std::size_t c = n_classes; c-- > 0;) {
        out.class_start[c] = start[c][end];
        if (c > 0) end = out.class_start[c] - 1;
    }
    out.breaks.reserve(n_classes + 1);
    for (std::size_t c = 0; c < n_classes; ++c) out.breaks.push_back(sorted[out.class_start[c]]);
    out.breaks.push_back(sorted[n - 1]);

    double mean = 0.0;
    double m2 = 0.0;
    std::size_t count = 0;
    for (double x : sorted) {
        ++count;
        const double delta = x - mean;
        mean += delta / static_cast<double>(count);
        m2 += delta * (x - mean);
    }
    out.sdam = m2;
    if (out.sdam <= 0.0) {
        out.gvf = 1.0;
    } else {
        out.gvf = std::clamp((out.sdam - out.sdcm) / out.sdam, 0.0, 1.0);
        if (n_classes == 1) out.gvf = 0.0;
    }
    return out;
}

namespace {

std::vector<double> sorted_values(std::span<const CircuitSample> samples) {
    std::vector<double> v;
    v.reserve(samples.size());
    for (const auto& s : samples) v.push_back(s.bw);
    std::sort(v.begin(), v.end());
    return v;
}

std::vector<CircuitId> all_ids(std::span<const CircuitSample> samples) {
    std::vector<CircuitId> ids;
    for (const auto& s : samples) ids.push_back(s.id);
    std::sort(ids.begin(), ids.end());
    return ids;
}

std::vector<CircuitId> ids_where(std::span<const CircuitSample> samples, auto pred) {
    std::vector<CircuitId> ids;
    for (const auto& s : samples) {
        if (pred(s.bw)) ids.push_back(s.id);
    }
    std::sort(ids.begin(), ids.end());
    return ids;
}

}  // namespace

std::vector<CircuitId> cluster_jenks_two(std::span<const CircuitSample> samples) {
    if (samples.size() < 2) return all_ids(samples);
    const auto v = sorted_values(samples);
    const auto r = jenks_breaks(v, 2);
    if (r.sdam <= 0.0) return all_ids(samples);
    const double cut = r.breaks[1];
    return ids_where(samples, [cut](double bw) { return bw >= cut; });
}

std::vector<CircuitId> cluster_jenks_best(std::span<const CircuitSample> samples, double tau) {
    if (samples.size() < 2) return all_ids(samples);
    const auto v = sorted_values(samples);
    JenksResult r;
    for (std::size_t k = 2; k <= v.size(); ++k) {
        r = jenks_breaks(v, k);
        if (r.gvf >= tau) break;
    }
    if (r.sdam <= 0.0) return all_ids(samples);
    const double cut = r.breaks[r.breaks.size() - 2];
    return ids_where(samples, [cut](double bw) { return bw >= cut; });
}

std::vector<double> head_tail(std::span<const double> data, double threshold) {
    std::vector<double> current(data.begin(), data.end());
    while (!current.empty()) {
        const double m = std::accumulate(current.begin(), current.end(), 0.0) /
                         static_cast<double>(current.size());
        std::vector<double> head;
        for (double d : current) {
            if (d >= m) head.push_back(d);
        }
        if (head.empty()) break;
        const double ratio = static_cast<double>(head.size()) / static_cast<double>(current.size());
        const bool recurse = ratio < threshold && head.size() < current.size();
        current = std::move(head);
        if (!recurse) break;
    }
    return current;
}

std::vector<CircuitId> cluster_head_tail(std::span<const CircuitSample> samples, double threshold) {
    if (samples.empty()) return {};
    std::vector<double> v;
    for (const auto& s : samples) v.push_back(s.bw);
    const auto head = head_tail(v, threshold);
    const double cut = *std::min_element(head.begin(), head.end());
    return ids_where(samples, [cut](double bw) { return bw >= cut; });
}

double kde_density(std::span<const double> pooled, double bandwidth, double x) {
    double sum = 0.0;
    const double inv = 1.0 / (2.0 * bandwidth * bandwidth);
    for (double s : pooled) {
        const double d = x - s;
        sum += std::exp(-d * d * inv);
    }
    return sum;
}

namespace {

// Kernel contributions beyond this many bandwidths are below 1e-17 and skipped.
constexpr double kKernelReach = 9.0;

std::vector<double> density_on_grid(std::span<const double> values, std::span<const double> weights,
                                    double h, std::span<const double> grid) {
    std::vector<double> dens(grid.size(), 0.0);
    const double inv = 1.0 / (2.0 * h * h);
    const double reach = kKernelReach * h;
    for (std::size_t g = 0; g < grid.size(); ++g) {
        const double x = grid[g];
        auto lo = std::lower_bound(values.begin(), values.end(), x - reach);
        auto hi = std::upper_bound(values.begin(), values.end(), x + reach);
        double sum = 0.0;
        for (auto it = lo; it != hi; ++it) {
            const double d = x - *it;
            sum += weights[static_cast<std::size_t>(it - values.begin())] * std::exp(-d * d * inv);
        }
        dens[g] = sum;
    }
    return dens;
}

// Minima over runs of equal density values: a run is a minimum when both
// neighbouring runs are strictly higher. Reported at the run's midpoint.
std::vector<double> local_minima(std::span<const double> dens, std::span<const double> grid) {
    struct Run {
        double value;
        std::size_t first, last;
    };
    std::vector<Run> runs;
    for (std::size_t i = 0; i < dens.size(); ++i) {
        if (!runs.empty() && runs.back().value == dens[i]) {
            runs.back().last = i;
        } else {
            runs.push_back({dens[i], i, i});
        }
    }
    std::vector<double> out;
    for (std::size_t r = 1; r + 1 < runs.size(); ++r) {
        if (runs[r - 1].value > runs[r].value && runs[r + 1].value > runs[r].value) {
            out.push_back(0.5 * (grid[runs[r].first] + grid[runs[r].last]));
        }
    }
    return out;
}

}  // namespace

KdeResult kde_split(std::span<const double> pooled, const KdeOptions& opts) {
    KdeResult out;
    if (pooled.empty()) {
        out.fallback = true;
        return out;
    }
    std::vector<double> sorted(pooled.begin(), pooled.end());
    std::sort(sorted.begin(), sorted.end());
    std::vector<double> values;
    std::vector<double> weights;
    for (double s : sorted) {
        if (!values.empty() && values.back() == s) {
            weights.back() += 1.0;
        } else {
            values.push_back(s);
            weights.push_back(1.0);
        }
    }
    const double mean = std::accumulate(sorted.begin(), sorted.end(), 0.0) /
                        static_cast<double>(sorted.size());
    const double top = sorted.back() * opts.grid_headroom;
    const std::size_t points = std::max<std::size_t>(3, opts.grid_points);
    std::vector<double> grid(points);
    for (std::size_t i = 0; i < points; ++i) {
        grid[i] = top * static_cast<double>(i) / static_cast<double>(points - 1);
    }

    double h = std::sqrt(std::max(mean, 0.0));
    double tried = h;
    if (h > 0.0 && top > 0.0) {
        for (int k = 0; k <= opts.max_halvings; ++k, h *= 0.5) {
            tried = h;
            const auto dens = density_on_grid(values, weights, h, grid);
            auto minima = local_minima(dens, grid);
            if (!minima.empty()) {
                out.minima = std::move(minima);
                out.kernel_bandwidth = h;
                out.halvings = k;
                out.cut = out.minima.back();
                return out;
            }
        }
    }
    out.fallback = true;
    out.halvings = opts.max_halvings;
    out.kernel_bandwidth = tried;
    out.cut = mean;
    return out;
}

std::vector<CircuitId> cluster_kde(std::span<const double> pooled,
                                   std::span<const CircuitSample> current, const KdeOptions& opts) {
    if (pooled.empty() || current.empty()) return {};
    const auto split = kde_split(pooled, opts);
    const double cut = split.cut;
    if (split.fallback) {
        const double floor = cut * (1.0 - 1e-12);
        return ids_where(current, [floor](double bw) { return bw >= floor; });
    }
    return ids_where(current, [cut](double bw) { return bw > cut; });
}

}  // namespace poa

#include "poa/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

#include "poa/adversary.hpp"
#include "poa/error.hpp"

namespace poa::report {

namespace {

constexpr double kEps = 1e-9;

std::string fmt_opt(const std::optional<double>& v, const char* unit) {
    if (!v) return "n/a";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.3f%s", *v, unit);
    return buf;
}

}  // namespace

std::optional<double> median(std::vector<double> values) {
    if (values.empty()) return std::nullopt;
    const std::size_t n = values.size();
    auto mid = values.begin() + static_cast<std::ptrdiff_t>(n / 2);
    std::nth_element(values.begin(), mid, values.end());
    const double hi = *mid;
    if (n % 2 == 1) return hi;
    const double lo = *std::max_element(values.begin(), mid);
    return 0.5 * (lo + hi);
}

std::vector<double> quantiles(std::vector<double> values, std::size_t points) {
    if (values.empty() || points == 0) return {};
    std::sort(values.begin(), values.end());
    std::vector<double> out(points);
    const double last = static_cast<double>(values.size() - 1);
    for (std::size_t i = 0; i < points; ++i) {
        const double p = points == 1 ? 0.5 : static_cast<double>(i) / static_cast<double>(points - 1);
        const double pos = p * last;
        const auto lo = static_cast<std::size_t>(std::floor(pos));
        const std::size_t hi = std::min(lo + 1, values.size() - 1);
        const double frac = pos - static_cast<double>(lo);
        out[i] = values[lo] + frac * (values[hi] - values[lo]);
    }
    return out;
}

RunSamples collect_samples(const RunMetrics& m, double horizon_s) {
    RunSamples s;
    std::vector<double> util_sum(m.relays.size(), 0.0);
    std::size_t ticks = 0;
    for (std::size_t i = 0; i < m.tick_time.size(); ++i) {
        if (m.tick_time[i] > horizon_s + kEps) break;
        s.total_bw_kibps.push_back(m.client_bw_kibps[i]);
        for (std::size_t r = 0; r < util_sum.size(); ++r) util_sum[r] += m.utilization[i][r];
        ++ticks;
    }
    if (ticks > 0) {
        for (double u : util_sum) s.utilization.push_back(u / static_cast<double>(ticks));
    }
    for (const auto& d : m.downloads) {
        if (d.first_byte_s && *d.first_byte_s <= horizon_s + kEps) s.ttfb_s.push_back(*d.first_byte_s - d.start_s);
        if (!d.end_s || *d.end_s > horizon_s + kEps) continue;
        const double dt = *d.end_s - d.start_s;
        if (d.kind == ClientKind::web) s.web_time_s.push_back(dt);
        if (d.kind == ClientKind::bulk) s.bulk_time_s.push_back(dt);
    }
    return s;
}

RunSummary summarize(const RunSamples& s, std::size_t downloads, std::size_t completed) {
    RunSummary out;
    out.median_total_bw_kibps = median(s.total_bw_kibps);
    out.median_web_s = median(s.web_time_s);
    out.median_bulk_s = median(s.bulk_time_s);
    out.median_ttfb_s = median(s.ttfb_s);
    out.median_utilization = median(s.utilization);
    out.downloads = downloads;
    out.completed = completed;
    return out;
}

RunSummary summarize(const RunMetrics& m) {
    return summarize(collect_samples(m, m.duration_s), m.downloads.size(), m.completed_downloads());
}

std::string summary_line(const RunSummary& s) {
    return "median_total_bw=" + fmt_opt(s.median_total_bw_kibps, "KiB/s") +
           " median_web=" + fmt_opt(s.median_web_s, "s") + " median_bulk=" + fmt_opt(s.median_bulk_s, "s") +
           " median_ttfb=" + fmt_opt(s.median_ttfb_s, "s") + " completed=" + std::to_string(s.completed) + "/" +
           std::to_string(s.downloads);
}

namespace {

const std::vector<double>& pick(const RunSamples& s, std::size_t metric) {
    switch (metric) {
        case 0: return s.total_bw_kibps;
        case 1: return s.web_time_s;
        case 2: return s.bulk_time_s;
        case 3: return s.ttfb_s;
        default: return s.utilization;
    }
}

}  // namespace

Comparison compare_runs(const std::vector<RunMetrics>& runs, const std::vector<std::string>& labels,
                        std::size_t cdf_points) {
    if (runs.empty()) throw Error("nothing to compare");
    if (labels.size() != runs.size()) throw Error("one label per run required");
    Comparison out;
    out.labels = labels;
    out.horizon_s = runs.front().duration_s;
    for (const auto& r : runs) out.horizon_s = std::min(out.horizon_s, r.duration_s);
    for (std::size_t i = 0; i < runs.size(); ++i) {
        if (runs[i].duration_s > out.horizon_s + kEps) {
            char buf[160];
            std::snprintf(buf, sizeof buf, "%s: duration %.1fs truncated to %.1fs", labels[i].c_str(),
                          runs[i].duration_s, out.horizon_s);
            out.warnings.emplace_back(buf);
        }
    }
    std::vector<RunSamples> samples;
    for (const auto& r : runs) {
        samples.push_back(collect_samples(r, out.horizon_s));
        std::size_t downloads = 0, completed = 0;
        for (const auto& d : r.downloads) {
            if (d.start_s > out.horizon_s + kEps) continue;
            ++downloads;
            if (d.end_s && *d.end_s <= out.horizon_s + kEps) ++completed;
        }
        out.summaries.push_back(summarize(samples.back(), downloads, completed));
    }
    const auto& names = metric_names();
    out.cdfs.resize(names.size());
    for (std::size_t m = 0; m < names.size(); ++m) {
        std::vector<std::optional<double>> med;
        for (const auto& s : samples) {
            out.cdfs[m].push_back(quantiles(pick(s, m), cdf_points));
            med.push_back(median(pick(s, m)));
        }
        for (std::size_t i = 0; i < runs.size(); ++i) {
            MetricDelta d;
            d.metric = names[m];
            d.run = i;
            d.base = med.front();
            d.value = med[i];
            if (d.base && d.value) {
                if (*d.base != 0.0) {
                    d.percent = 100.0 * (*d.value - *d.base) / std::abs(*d.base);
                } else if (*d.value == 0.0) {
                    d.percent = 0.0;
                }
            }
            out.deltas.push_back(d);
        }
    }
    return out;
}

const SweepCell& SweepResult::cell(ClusterMethod m, int granularity_ms, double window_s) const {
    for (const auto& c : cells) {
        if (c.method == m && c.granularity_ms == granularity_ms && std::abs(c.window_s - window_s) < kEps) return c;
    }
    throw LookupError("no sweep cell for the requested parameters");
}

SweepResult run_sweep(ExperimentConfig config, const SweepOptions& options) {
    struct Setting {
        EstimatorParams params;
        std::vector<EstimatePair> pairs;
    };
    std::vector<Setting> settings;
    double max_window = 0.0;
    for (auto m : options.methods) {
        for (int g : options.granularities_ms) {
            for (double w : options.windows_s) {
                Setting s;
                s.params.method = m;
                s.params.granularity_ms = g;
                s.params.window_s = w;
                s.params.tau = options.tau;
                s.params.threshold = options.threshold;
                s.params.validate();
                settings.push_back(std::move(s));
                max_window = std::max(max_window, w);
            }
        }
    }
    if (settings.empty()) throw Error("empty sweep grid");

    config.policy = PolicyKind::central_dwc;
    config.tick_s = kBucketSeconds;
    config.history_s = std::max(config.history_s, max_window);

    std::vector<double> central_pool;
    std::size_t probes = 0;
    double next_probe = 0.0;
    RunHooks hooks;
    hooks.on_central_probe = [&](const ProbeContext& ctx) {
        if (ctx.t + kEps < next_probe || ctx.last_bucket < 0) return;
        next_probe = ctx.t + options.probe_interval_s;
        ++probes;
        for (RelayIndex r = 0; r < ctx.relay_active.size(); ++r) {
            if (!ctx.relay_active[r]) continue;
            const double central = static_cast<double>(ctx.central_counts[r]);
            central_pool.push_back(central);
            // Windows of equal length are shared across methods and granularities.
            std::vector<std::pair<std::size_t, std::vector<std::pair<CircuitId, std::vector<double>>>>> cache;
            for (auto& s : settings) {
                const std::size_t wb = s.params.window_buckets();
                auto it = std::find_if(cache.begin(), cache.end(), [&](const auto& e) { return e.first == wb; });
                if (it == cache.end()) {
                    cache.emplace_back(wb, ctx.histories->windows(r, ctx.last_bucket, wb));
                    it = std::prev(cache.end());
                }
                std::vector<CircuitHistoryView> views;
                views.reserve(it->second.size());
                for (const auto& [id, buckets] : it->second) views.push_back({id, buckets});
                const auto lw = local_weight(views, s.params);
                s.pairs.push_back({static_cast<double>(lw.bottlenecks.size()), central});
            }
        }
    };
    run(config, hooks);

    SweepResult out;
    out.probes = probes;
    for (const auto& s : settings) {
        SweepCell c;
        c.method = s.params.method;
        c.granularity_ms = s.params.granularity_ms;
        c.window_s = s.params.window_s;
        c.pairs = s.pairs.size();
        c.mse = mse_bottlenecks(s.pairs);
        out.cells.push_back(c);
    }
    Rng rng(options.baseline_seed);
    out.baseline_pairs = central_pool.size();
    out.baseline_mse = weighted_random_mse(central_pool, rng, options.baseline_draws);
    return out;
}

}  // namespace poa::report

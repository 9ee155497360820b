#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "poa/error.hpp"
#include "poa/fixtures.hpp"
#include "poa/report.hpp"

using namespace poa;
using namespace poa::report;

TEST_CASE("median") {
    CHECK_FALSE(median({}).has_value());
    CHECK(*median({3}) == 3.0);
    CHECK(*median({5, 1, 3}) == 3.0);
    CHECK(*median({4, 1, 3, 2}) == 2.5);
}

TEST_CASE("quantiles interpolate between order statistics") {
    CHECK(quantiles({}).empty());
    auto q = quantiles({10, 0}, 5);
    REQUIRE(q.size() == 5);
    CHECK(q == std::vector<double>{0, 2.5, 5, 7.5, 10});
    auto one = quantiles({7}, 4);
    CHECK(one == std::vector<double>(4, 7.0));

    Rng rng(3);
    std::vector<double> v(301);
    for (auto& x : v) x = rng.uniform(0, 100);
    auto c = quantiles(v, 1000);
    REQUIRE(c.size() == 1000);
    CHECK(std::is_sorted(c.begin(), c.end()));
    CHECK(c.front() == *std::min_element(v.begin(), v.end()));
    CHECK(c.back() == *std::max_element(v.begin(), v.end()));
    CHECK(quantiles(v, 3)[1] == *median(v));
}

TEST_CASE("samples and summaries") {
    const auto m = run(minimal_fixture(PolicyKind::vanilla, 1));
    auto s = collect_samples(m, m.duration_s);
    CHECK(s.total_bw_kibps.size() == m.tick_time.size());
    CHECK(s.web_time_s.size() == m.completed_downloads());
    CHECK(s.web_time_s.front() == doctest::Approx(1.0));
    CHECK(s.ttfb_s.front() == 0.0);
    CHECK(s.bulk_time_s.empty());
    CHECK(s.utilization.size() == m.relays.size());
    auto sum = summarize(m);
    CHECK(sum.downloads == m.downloads.size());
    CHECK(sum.completed == m.completed_downloads());
    CHECK_FALSE(sum.median_bulk_s.has_value());
    CHECK(*sum.median_web_s == doctest::Approx(1.0));
    CHECK_FALSE(summary_line(sum).empty());

    auto early = collect_samples(m, 0.0);
    CHECK(early.total_bw_kibps.size() == 1);
}

TEST_CASE("a run compared with itself shows no change") {
    auto cfg = standard_fixture(PolicyKind::vanilla, 1);
    cfg.duration_s = 120;
    const auto m = run(cfg);
    auto c = compare_runs({m, m}, {"a", "b"}, 50);
    CHECK(c.warnings.empty());
    CHECK(c.horizon_s == 120.0);
    REQUIRE(c.cdfs.size() == metric_names().size());
    for (const auto& per_metric : c.cdfs) {
        REQUIRE(per_metric.size() == 2);
        CHECK(per_metric[0] == per_metric[1]);
    }
    for (const auto& d : c.deltas) {
        if (d.run == 1 && d.percent) CHECK(*d.percent == 0.0);
    }
    CHECK_THROWS_AS(compare_runs({}, {}), Error);
}

TEST_CASE("runs of unequal length are truncated with a warning") {
    auto a = standard_fixture(PolicyKind::vanilla, 1);
    a.duration_s = 120;
    auto b = standard_fixture(PolicyKind::central_dwc, 1);
    b.duration_s = 60;
    const auto ma = run(a);
    const auto mb = run(b);
    auto c = compare_runs({ma, mb}, {"vanilla", "central"});
    CHECK(c.horizon_s == 60.0);
    REQUIRE(c.warnings.size() == 1);
    CHECK(c.warnings[0].find("vanilla") != std::string::npos);
    const auto& bw = c.cdfs[0];
    auto base = collect_samples(ma, 60.0);
    CHECK(bw[0] == quantiles(base.total_bw_kibps, 1000));
    for (const auto& d : c.deltas) {
        if (d.run != 1 || !d.base || !d.value || *d.base == 0.0) continue;
        REQUIRE(d.percent);
        CHECK(*d.percent == doctest::Approx(100.0 * (*d.value - *d.base) / *d.base));
    }
}

TEST_CASE("estimator sweep covers every setting") {
    auto cfg = standard_fixture(PolicyKind::central_dwc, 1);
    cfg.duration_s = 200;
    SweepOptions opts;
    opts.probe_interval_s = 10;
    auto r = run_sweep(cfg, opts);
    CHECK(r.cells.size() == 32);
    CHECK(r.probes > 0);
    CHECK(r.baseline_pairs > 0);
    CHECK(std::isfinite(r.baseline_mse));
    for (const auto& c : r.cells) {
        CHECK(std::isfinite(c.mse));
        CHECK(c.mse >= 0.0);
        CHECK(c.pairs > 0);
    }
    const auto& cell = r.cell(ClusterMethod::kde, 1000, 5.0);
    CHECK(cell.method == ClusterMethod::kde);
    CHECK(cell.granularity_ms == 1000);
    CHECK(cell.window_s == 5.0);
    CHECK_THROWS_AS(r.cell(ClusterMethod::kde, 1000, 3.0), LookupError);
}

TEST_CASE("weighted-random baseline is stable across seeds") {
    auto cfg = standard_fixture(PolicyKind::central_dwc, 1);
    cfg.duration_s = 200;
    SweepOptions opts;
    opts.probe_interval_s = 10;
    opts.methods = {ClusterMethod::head_tail};
    opts.granularities_ms = {1000};
    opts.windows_s = {1.0};
    opts.baseline_draws = 2000;
    auto a = run_sweep(cfg, opts);
    opts.baseline_seed = 2;
    auto b = run_sweep(cfg, opts);
    CHECK(a.cells.size() == 1);
    CHECK(a.cells[0].mse == b.cells[0].mse);
    CHECK(b.baseline_mse == doctest::Approx(a.baseline_mse).epsilon(0.05));
}

#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "poa/decentralized.hpp"
#include "poa/error.hpp"

using namespace poa;

namespace {

double brute_max_window(const std::vector<double>& b, std::size_t g) {
    const std::size_t w = std::min(g, b.size());
    double best = -INFINITY;
    for (std::size_t off = 0; off + w <= b.size(); ++off) {
        double s = 0.0;
        for (std::size_t k = 0; k < w; ++k) s += b[off + k];
        best = std::max(best, s);
    }
    return best / (static_cast<double>(g) * 0.1);
}

}  // namespace

TEST_CASE("cell history addresses absolute buckets") {
    CellHistory h(5);
    h.add(0, 3);
    h.add(2, 4);
    h.add(2, 1);
    CHECK(h.window(2, 3) == std::vector<double>{3, 0, 5});
    CHECK(h.window(4, 5) == std::vector<double>{3, 0, 5, 0, 0});
    h.add(7, 2);
    CHECK(h.window(7, 5) == std::vector<double>{0, 0, 0, 0, 2});
    CHECK(h.window(7, 7) == std::vector<double>{0, 0, 0, 0, 0, 0, 2});
    h.add(1, 9);
    CHECK(h.window(7, 5) == std::vector<double>{0, 0, 0, 0, 2});
    CHECK_FALSE(h.idle(7, 1));
    CHECK(h.idle(6, 3));
    h.add(20, 0);
    CHECK(h.idle(20, 5));
    CHECK(h.newest() == 20);
}

TEST_CASE("circuit bandwidth estimate") {
    std::vector<double> uniform(10, 10.0);
    CHECK(circuit_bw_estimate(uniform, 10) == doctest::Approx(100.0));
    std::vector<double> burst(10, 0.0);
    burst[4] = 50.0;
    CHECK(circuit_bw_estimate(burst, 1) == doctest::Approx(500.0));
    CHECK(circuit_bw_estimate({}, 1) == 0.0);

    Rng rng(6);
    for (int rep = 0; rep < 300; ++rep) {
        std::vector<double> b(1 + rng.index(100));
        for (auto& x : b) x = static_cast<double>(rng.index(40));
        const std::size_t g = 1 + rng.index(12);
        CHECK(circuit_bw_estimate(b, g) == doctest::Approx(brute_max_window(b, g)));
        const auto rates = window_rates(b, g);
        CHECK(*std::max_element(rates.begin(), rates.end()) == doctest::Approx(circuit_bw_estimate(b, g)));
    }
}

TEST_CASE("estimator params validation") {
    EstimatorParams p;
    CHECK_NOTHROW(p.validate());
    CHECK(p.window_buckets() == 10);
    CHECK(p.granularity_buckets() == 1);
    p.granularity_ms = 150;
    CHECK_THROWS_AS(p.validate(), ConfigError);
    p.granularity_ms = 2000;
    CHECK_THROWS_AS(p.validate(), ConfigError);
    p.window_s = 5;
    CHECK_NOTHROW(p.validate());
    CHECK(parse_cluster_method("kde") == ClusterMethod::kde);
    CHECK_THROWS_AS(parse_cluster_method("kmeans"), ConfigError);
}

TEST_CASE("local weight sums inverse estimates of flagged circuits") {
    EstimatorParams p;
    p.window_s = 1;
    p.granularity_ms = 1000;
    p.method = ClusterMethod::jenks_two;
    // 50 and 25 cells/s over a 1 s window; a third circuit idle.
    std::vector<double> a(10, 5.0), b(10, 2.5), idle(10, 0.0);
    std::vector<CircuitHistoryView> views = {{1, a}, {2, b}, {3, idle}};
    auto lw = local_weight(std::span(views).first(2), p);
    CHECK(lw.bottlenecks == std::vector<CircuitId>{1});
    CHECK(lw.weight == doctest::Approx(1.0 / 50));
    auto with_idle = local_weight(views, p);
    CHECK(with_idle.bottlenecks == std::vector<CircuitId>{1});

    p.method = ClusterMethod::head_tail;
    p.threshold = 1.0;
    std::vector<double> c(10, 5.0);
    std::vector<CircuitHistoryView> equal = {{1, a}, {2, c}};
    auto both = local_weight(equal, p);
    CHECK(both.weight == doctest::Approx(2.0 / 50));

    std::vector<CircuitHistoryView> none = {{3, idle}};
    CHECK(local_weight(none, p).weight == 0.0);
}

TEST_CASE("flags of 50 and 25 cells/s give 0.06") {
    EstimatorParams p;
    p.granularity_ms = 1000;
    p.method = ClusterMethod::head_tail;
    p.threshold = 0.4;
    std::vector<std::vector<double>> hist;
    for (double rate : {50.0, 25.0, 2.0, 1.0, 1.0}) hist.emplace_back(10, rate / 10.0);
    std::vector<CircuitHistoryView> views;
    for (std::size_t i = 0; i < hist.size(); ++i) views.push_back({i, hist[i]});
    auto lw = local_weight(views, p);
    CHECK(lw.bottlenecks == std::vector<CircuitId>{0, 1});
    CHECK(lw.weight == doctest::Approx(0.06));
}

TEST_CASE("n equal one-hop flows weigh n squared over capacity") {
    const double cap_cells = 2000.0;
    for (std::size_t n : {1, 4, 10, 50}) {
        const double per_bucket = cap_cells / static_cast<double>(n) * 0.1;
        std::vector<std::vector<double>> hist(n, std::vector<double>(10, per_bucket));
        std::vector<CircuitHistoryView> views;
        for (std::size_t i = 0; i < n; ++i) views.push_back({i, hist[i]});
        for (auto m : {ClusterMethod::jenks_two, ClusterMethod::jenks_best, ClusterMethod::head_tail,
                       ClusterMethod::kde}) {
            EstimatorParams p;
            p.method = m;
            auto lw = local_weight(views, p);
            CHECK(lw.weight == doctest::Approx(static_cast<double>(n * n) / cap_cells));
        }
    }
}

TEST_CASE("local weight is label invariant and scales inversely") {
    Rng rng(12);
    for (int rep = 0; rep < 50; ++rep) {
        const std::size_t n = 2 + rng.index(8);
        std::vector<std::vector<double>> hist(n, std::vector<double>(10));
        for (auto& h : hist) for (auto& x : h) x = static_cast<double>(rng.index(50));
        std::vector<std::vector<double>> scaled = hist;
        for (auto& h : scaled) for (auto& x : h) x *= 4.0;
        std::vector<CircuitHistoryView> a, b, c;
        for (std::size_t i = 0; i < n; ++i) {
            a.push_back({i, hist[i]});
            b.push_back({1000 - i, hist[i]});
            c.push_back({i, scaled[i]});
        }
        for (auto m : {ClusterMethod::jenks_two, ClusterMethod::jenks_best, ClusterMethod::head_tail}) {
            EstimatorParams p;
            p.method = m;
            const double wa = local_weight(a, p).weight;
            CHECK(local_weight(b, p).weight == doctest::Approx(wa));
            CHECK(local_weight(c, p).weight == doctest::Approx(wa / 4.0));
        }
    }
}

TEST_CASE("gossip schedule") {
    CHECK(gossip_due(7, 12.0));
    CHECK_FALSE(gossip_due(7, 13.0));
    CHECK(gossip_due(7, 12.9));
    for (CircuitId id = 0; id < 20; ++id) {
        int fired = 0;
        for (int s = 0; s < 5; ++s) fired += gossip_due(id, 100.0 + s);
        CHECK(fired == 1);
        CHECK(gossip_due(id, 100.0 + static_cast<double>(id % 5)) == gossip_due(id, 105.0 + static_cast<double>(id % 5)));
    }
}

TEST_CASE("client selection") {
    RelayTable t({{"A", 100, false}, {"B", 30, false}, {"C", 80, false}, {"D", 100, false},
                  {"E", 200, true}});
    const Circuit slow{{0, 1, 4}}, fast{{0, 2, 4}}, other{{3, 2, 4}};
    std::vector<Circuit> acceptable = {slow, fast};
    Rng rng(1);
    CHECK(client_select(acceptable, {}, t, rng) == 1);

    std::map<RelayIndex, double> gossip = {{2, 0.5}};
    CHECK(client_select(acceptable, gossip, t, rng) == 0);
    CHECK_THROWS_AS(client_select({}, gossip, t, rng), Error);

    std::vector<Circuit> tie = {fast, other};
    std::vector<int> counts(2, 0);
    for (int i = 0; i < 2000; ++i) ++counts[client_select(tie, {}, t, rng)];
    CHECK(counts[0] > 800);
    CHECK(counts[1] > 800);

    std::vector<Circuit> grown = {slow, fast, Circuit{{3, 1, 4}}};
    gossip = {{1, 0.2}, {3, 0.3}};
    Rng r1(5), r2(5);
    CHECK(client_select(std::span(grown).first(2), gossip, t, r1) == client_select(grown, gossip, t, r2));
}

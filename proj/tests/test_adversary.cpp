#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "poa/adversary.hpp"
#include "poa/error.hpp"
#include "poa/fixtures.hpp"

using namespace poa;

namespace {

double independent_pearson(const std::vector<double>& x, const std::vector<double>& y) {
    const double n = static_cast<double>(x.size());
    double sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        syy += y[i] * y[i];
        sxy += x[i] * y[i];
    }
    return (n * sxy - sx * sy) / std::sqrt((n * sxx - sx * sx) * (n * syy - sy * sy));
}

SelectionRecord decision(std::vector<Circuit> cands, std::size_t chosen, std::map<RelayIndex, double> w) {
    SelectionRecord s;
    s.candidates = std::move(cands);
    s.chosen = chosen;
    s.weights = std::move(w);
    return s;
}

}  // namespace

TEST_CASE("mse of bottleneck estimates") {
    std::vector<EstimatePair> same = {{3, 3}, {0, 0}, {5, 5}};
    CHECK(mse_bottlenecks(same) == 0.0);
    std::vector<EstimatePair> off = {{4, 3}, {0, 1}, {6, 5}};
    CHECK(mse_bottlenecks(off) == 1.0);
    CHECK_THROWS_AS(mse_bottlenecks({}), Error);
}

TEST_CASE("observations pair by relay and time") {
    std::vector<BottleneckObservation> local = {{1.0, 0, 2}, {2.0, 0, 3}, {1.0, 1, 7}};
    std::vector<BottleneckObservation> central = {{2.0, 0, 3}, {1.0, 1, 6}, {1.0, 2, 1}, {5.0, 0, 1}};
    auto p = pair_observations(local, central);
    REQUIRE(p.size() == 2);
    CHECK(p[0].local == 3);
    CHECK(p[0].central == 3);
    CHECK(p[1].local == 7);
    CHECK(p[1].central == 6);
    CHECK(pair_observations(local, central, 3.0).size() == 3);
}

TEST_CASE("weighted-random baseline matches its closed form") {
    Rng rng(17);
    const std::vector<double> pool = {3.0};
    CHECK(weighted_random_estimator(pool, rng) == 3.0);
    CHECK(weighted_random_mse(pool, rng, 10) == 0.0);
    CHECK_THROWS_AS(weighted_random_estimator({}, rng), Error);
    CHECK_THROWS_AS(weighted_random_mse({}, rng), Error);

    // X and Y independent uniform over the pool: E[(X-Y)^2] = 2 Var.
    const std::vector<double> two = {0.0, 2.0};
    CHECK(weighted_random_mse(two, rng, 200000) == doctest::Approx(2.0).epsilon(0.01));

    std::vector<double> skewed = {0, 0, 0, 1, 1, 2, 5, 9};
    const double n = static_cast<double>(skewed.size());
    const double mean = std::accumulate(skewed.begin(), skewed.end(), 0.0) / n;
    double var = 0.0;
    for (double x : skewed) var += (x - mean) * (x - mean);
    var /= n;
    CHECK(weighted_random_mse(skewed, rng, 100000) == doctest::Approx(2.0 * var).epsilon(0.01));
}

TEST_CASE("a relay that never appears cannot move any decision") {
    RelayTable t({{"A", 100, false}, {"B", 100, false}, {"C", 100, false}, {"D", 100, false},
                  {"X", 100, true}, {"Y", 100, true}, {"L", 100, false}});
    const Circuit c1{{0, 1, 4}}, c2{{2, 3, 5}};
    std::vector<SelectionRecord> log = {decision({c1, c2}, 0, {{1, 0.1}}), decision({c1, c2}, 1, {})};
    auto r = lying_relay_reselect(log, 6, t);
    CHECK(r.changed_decisions == 0);
    for (const auto& s : r.shares) CHECK(s.delta() == 0.0);
    CHECK_THROWS_AS(lying_relay_reselect(log, 42, t), LookupError);
}

TEST_CASE("lying relay attracts exactly the decisions it can flip") {
    RelayTable t({{"A", 100, false}, {"B", 100, false}, {"C", 100, false}, {"L", 100, false},
                  {"X", 100, true}, {"Y", 100, true}});
    const RelayIndex liar = 3;
    const Circuit honest{{0, 1, 4}}, via_liar{{2, liar, 5}};
    std::vector<SelectionRecord> log;
    // k decisions avoided the liar only because of its weight.
    const std::size_t k = 3, total = 10;
    for (std::size_t i = 0; i < k; ++i) log.push_back(decision({honest, via_liar}, 0, {{liar, 0.5}, {1, 0.1}}));
    // Decisions where the honest circuit is strictly cleaner even with the liar at zero.
    for (std::size_t i = k; i < 7; ++i) log.push_back(decision({honest, via_liar}, 0, {{liar, 0.5}, {2, 0.3}}));
    // Decisions already through the liar.
    for (std::size_t i = 7; i < total; ++i) log.push_back(decision({honest, via_liar}, 1, {}));
    auto r = lying_relay_reselect(log, liar, t);
    CHECK(r.changed_decisions == k);
    CHECK(r.shares[liar].before == doctest::Approx(3.0 / total));
    CHECK(r.shares[liar].delta() == doctest::Approx(static_cast<double>(k) / total));
    CHECK(r.shares[0].delta() == doctest::Approx(-static_cast<double>(k) / total));
    CHECK(std::is_sorted(r.delta_cdf.begin(), r.delta_cdf.end()));
    CHECK(r.delta_cdf.size() == t.size());
}

TEST_CASE("weight deltas correlate with bottleneck deltas") {
    std::vector<GossipRecord> g = {
        {0, 0, 0.10, 1, 3}, {5, 0, 0.30, 3, 4}, {10, 0, 0.30, 3, 4}, {15, 0, 0.20, 2, 4},
        {0, 1, 0.00, 0, 0}, {5, 1, 0.00, 0, 0},
    };
    auto r = weight_correlation(g);
    REQUIRE(r.pairs.size() == 2);
    CHECK(r.pairs[0].relay == 0);
    CHECK(r.pairs[0].t == 5.0);
    CHECK(r.pairs[0].d_weight == doctest::Approx(0.2));
    CHECK(r.pairs[0].d_bottlenecks == 2.0);
    CHECK(r.pairs[1].d_bottlenecks == -1.0);
    CHECK(r.pearson == doctest::Approx(1.0));

    std::vector<GossipRecord> idle = {{0, 2, 0, 0, 0}, {5, 2, 0, 0, 0}};
    CHECK(weight_correlation(idle).pairs.empty());
}

TEST_CASE("pearson and spearman") {
    Rng rng(31);
    for (int rep = 0; rep < 20; ++rep) {
        std::vector<double> x(30), y(30);
        for (std::size_t i = 0; i < x.size(); ++i) {
            x[i] = rng.uniform(0, 10);
            y[i] = 0.5 * x[i] + rng.uniform(0, 4);
        }
        CHECK(pearson(x, y) == doctest::Approx(independent_pearson(x, y)).epsilon(1e-9));
    }
    std::vector<double> x = {1, 2, 3, 4, 5};
    std::vector<double> cubic = {1, 8, 27, 64, 125};
    CHECK(spearman(x, cubic) == doctest::Approx(1.0));
    CHECK(pearson(x, cubic) < 1.0);
    std::vector<double> flat = {2, 2, 2, 2, 2};
    CHECK(pearson(x, flat) == 0.0);
}

TEST_CASE("a zero-flow attack leaves the target untouched") {
    auto cfg = standard_fixture(PolicyKind::decentral_dwc, 1);
    cfg.duration_s = 120.0;
    auto quiet = run_dos(cfg, "r005", 0, 60.0, 10.0);
    CHECK(quiet.n_squared_over_bw == 0.0);
    for (const auto& s : quiet.series) CHECK(s.attack_kibps == 0.0);

    auto plain = cfg;
    plain.attack = AttackConfig{"r005", 0, 60.0, std::nullopt};
    const auto m = run(plain);
    REQUIRE(m.target.size() == quiet.series.size());
    for (std::size_t i = 0; i < m.target.size(); ++i) CHECK(m.target[i].weight == quiet.series[i].weight);
}

TEST_CASE("saturating a relay under decentralized selection") {
    auto cfg = standard_fixture(PolicyKind::decentral_dwc, 1);
    cfg.duration_s = 400.0;
    const std::size_t n = 10;
    auto rep = run_dos(cfg, "r005", n, 300.0, 10.0);
    const double cap_cells = cfg.relays.at(cfg.relays.index_of("r005")).capacity * kCellsPerKiB;
    CHECK(rep.n_squared_over_bw == doctest::Approx(n * n / cap_cells));
    CHECK(rep.steady_weight == doctest::Approx(rep.n_squared_over_bw).epsilon(0.1));
    CHECK(rep.completed_during == 0);
    CHECK(rep.series.size() == 400);
    CHECK_THROWS_AS(run_dos(cfg, "missing", n, 300.0, 10.0), Error);
}

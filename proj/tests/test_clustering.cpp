#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "poa/clustering.hpp"
#include "poa/error.hpp"
#include "poa/rng.hpp"

using namespace poa;

namespace {

std::vector<CircuitSample> samples(std::vector<double> bw) {
    std::vector<CircuitSample> out;
    for (std::size_t i = 0; i < bw.size(); ++i) out.push_back({100 + i, bw[i]});
    return out;
}

std::vector<CircuitId> ids_of(const std::vector<CircuitSample>& s, std::initializer_list<std::size_t> idx) {
    std::vector<CircuitId> out;
    for (auto i : idx) out.push_back(s[i].id);
    std::sort(out.begin(), out.end());
    return out;
}

double ssd(std::span<const double> v) {
    if (v.empty()) return 0.0;
    const double m = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
    double s = 0.0;
    for (double x : v) s += (x - m) * (x - m);
    return s;
}

// Exhaustive best partition of sorted data into k contiguous classes.
struct Brute {
    double sdcm = INFINITY;
    std::vector<std::size_t> starts;
};

void brute_rec(std::span<const double> v, std::size_t k, std::vector<std::size_t>& starts, Brute& best) {
    if (starts.size() == k) {
        double total = 0.0;
        for (std::size_t c = 0; c < k; ++c) {
            const std::size_t end = c + 1 < k ? starts[c + 1] : v.size();
            total += ssd(v.subspan(starts[c], end - starts[c]));
        }
        if (total < best.sdcm) {
            best.sdcm = total;
            best.starts = starts;
        }
        return;
    }
    const std::size_t remaining = k - starts.size();
    for (std::size_t s = starts.back() + 1; s + remaining <= v.size(); ++s) {
        starts.push_back(s);
        brute_rec(v, k, starts, best);
        starts.pop_back();
    }
}

Brute brute_jenks(std::span<const double> v, std::size_t k) {
    Brute best;
    std::vector<std::size_t> starts = {0};
    brute_rec(v, k, starts, best);
    return best;
}

double partition_ssd(std::span<const double> v, const std::vector<std::size_t>& starts) {
    double total = 0.0;
    for (std::size_t c = 0; c < starts.size(); ++c) {
        const std::size_t end = c + 1 < starts.size() ? starts[c + 1] : v.size();
        total += ssd(v.subspan(starts[c], end - starts[c]));
    }
    return total;
}

}  // namespace

TEST_CASE("jenks two classes on a separated set") {
    const std::vector<double> v = {1, 2, 10, 11};
    auto r = jenks_breaks(v, 2);
    REQUIRE(r.class_start == std::vector<std::size_t>{0, 2});
    CHECK(r.breaks == std::vector<double>{1, 10, 11});
    CHECK(r.sdcm == doctest::Approx(1.0));
    CHECK(r.gvf == doctest::Approx((ssd(v) - 1.0) / ssd(v)));
}

TEST_CASE("jenks degenerate cases") {
    const std::vector<double> v = {3, 4, 8};
    CHECK(jenks_breaks(v, 1).gvf == 0.0);
    const std::vector<double> same = {5, 5, 5};
    CHECK(jenks_breaks(same, 2).gvf == 1.0);
    CHECK_THROWS_AS(jenks_breaks(v, 4), Error);
    CHECK_THROWS_AS(jenks_breaks(v, 0), Error);
    const std::vector<double> unsorted = {3, 1};
    CHECK_THROWS_AS(jenks_breaks(unsorted, 1), Error);
    CHECK(jenks_breaks(v, 3).gvf == doctest::Approx(1.0));
}

TEST_CASE("jenks matches exhaustive search on random data") {
    Rng rng(77);
    for (int rep = 0; rep < 150; ++rep) {
        const std::size_t n = 1 + rng.index(12);
        std::vector<double> v(n);
        for (auto& x : v) x = rng.uniform(0.0, 100.0);
        std::sort(v.begin(), v.end());
        const std::size_t k = 1 + rng.index(n);
        auto r = jenks_breaks(v, k);
        auto b = brute_jenks(v, k);
        CHECK(partition_ssd(v, r.class_start) == doctest::Approx(b.sdcm).epsilon(1e-12));
        CHECK(r.sdcm == doctest::Approx(b.sdcm).epsilon(1e-9));
    }
}

TEST_CASE("jenks_two flags the upper class") {
    auto s = samples({11, 1, 10, 2});
    CHECK(cluster_jenks_two(s) == ids_of(s, {0, 2}));
    auto single = samples({5});
    CHECK(cluster_jenks_two(single) == ids_of(single, {0}));
    auto same = samples({4, 4, 4});
    CHECK(cluster_jenks_two(same) == ids_of(same, {0, 1, 2}));
}

TEST_CASE("jenks_best grows classes until the fit is good enough") {
    auto s = samples({1, 1, 5, 5, 20, 21});
    std::vector<double> v = {1, 1, 5, 5, 20, 21};
    std::size_t k = 2;
    for (; k < v.size(); ++k) {
        const double sdam = ssd(v);
        if ((sdam - brute_jenks(v, k).sdcm) / sdam >= 0.95) break;
    }
    CHECK(k == 2);
    CHECK(cluster_jenks_best(s, 0.95) == ids_of(s, {4, 5}));
    CHECK(cluster_jenks_best(s, 0.0) == cluster_jenks_two(s));
    auto distinct = samples({1, 2, 4, 8});
    CHECK(cluster_jenks_best(distinct, 1.0) == ids_of(distinct, {3}));
}

TEST_CASE("head/tail worked examples") {
    const std::vector<double> a = {1, 1, 1, 10, 10};
    CHECK(head_tail(a, 0.4) == std::vector<double>{10, 10});
    const std::vector<double> b = {1, 2, 3, 4, 100};
    CHECK(head_tail(b, 0.4) == std::vector<double>{100});
    const std::vector<double> c = {7, 7, 7};
    CHECK(head_tail(c, 0.4) == c);
    CHECK(cluster_head_tail({}, 0.4).empty());
    auto s = samples({1, 2, 3, 4, 100});
    CHECK(cluster_head_tail(s, 0.4) == ids_of(s, {4}));
}

TEST_CASE("head/tail output never falls below the mean") {
    Rng rng(2);
    for (int rep = 0; rep < 200; ++rep) {
        std::vector<double> v(1 + rng.index(30));
        for (auto& x : v) x = std::exp(rng.uniform(0.0, 6.0));
        const double m = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
        for (double x : head_tail(v, 0.4)) CHECK(x >= m);
    }
}

TEST_CASE("kde separates two clusters at the density valley") {
    Rng rng(10);
    std::vector<double> pooled;
    std::normal_distribution<double> lo(10.0, 1.0), hi(100.0, 3.0);
    for (int i = 0; i < 200; ++i) pooled.push_back(std::max(0.1, lo(rng.engine())));
    for (int i = 0; i < 100; ++i) pooled.push_back(hi(rng.engine()));
    auto split = kde_split(pooled);
    REQUIRE_FALSE(split.fallback);
    CHECK(split.cut > 14.0);
    CHECK(split.cut < 90.0);

    const double top = *std::max_element(pooled.begin(), pooled.end()) * 1.05;
    const double step = top / 511.0;
    // Dense scan of the untruncated density over the valley between the clusters.
    double best_x = 0.0, best_d = INFINITY;
    for (int i = 0; i <= 20000; ++i) {
        const double x = 20.0 + (85.0 - 20.0) * i / 20000.0;
        const double d = kde_density(pooled, split.kernel_bandwidth, x);
        if (d < best_d) {
            best_d = d;
            best_x = x;
        }
    }
    if (best_d > 0.0) {
        CHECK(std::abs(split.cut - best_x) <= step);
    } else {
        CHECK(kde_density(pooled, split.kernel_bandwidth, split.cut) <= 1e-300);
    }
    CHECK(kde_density(pooled, split.kernel_bandwidth, split.cut) <
          kde_density(pooled, split.kernel_bandwidth, 100.0));

    auto s = samples({10, 11, 99, 102});
    auto flagged = cluster_kde(pooled, s);
    CHECK(flagged == ids_of(s, {2, 3}));
}

TEST_CASE("kde grid minima agree with the untruncated density") {
    Rng rng(4);
    for (int rep = 0; rep < 20; ++rep) {
        std::vector<double> pooled;
        for (int i = 0; i < 40; ++i) pooled.push_back(rng.uniform(1.0, 200.0));
        auto split = kde_split(pooled);
        if (split.fallback) continue;
        const double top = *std::max_element(pooled.begin(), pooled.end()) * 1.05;
        std::vector<double> dens(512);
        for (int g = 0; g < 512; ++g) dens[g] = kde_density(pooled, split.kernel_bandwidth, top * g / 511.0);
        for (double m : split.minima) {
            const auto g = static_cast<int>(std::lround(m / (top / 511.0)));
            REQUIRE(g > 0);
            REQUIRE(g < 511);
            CHECK(dens[g] <= dens[g - 1] * (1 + 1e-9));
            CHECK(dens[g] <= dens[g + 1] * (1 + 1e-9));
        }
    }
}

TEST_CASE("kde fallback on a single tight cluster and a single sample") {
    std::vector<double> tight(50, 42.0);
    auto split = kde_split(tight);
    CHECK(split.fallback);
    CHECK(split.halvings == 20);
    CHECK(split.cut == doctest::Approx(42.0));
    auto s = samples({42, 41, 43});
    CHECK(cluster_kde(tight, s) == ids_of(s, {0, 2}));

    const std::vector<double> one = {7.0};
    auto single = samples({7});
    CHECK(cluster_kde(one, single) == ids_of(single, {0}));
    CHECK(cluster_kde({}, single).empty());
}

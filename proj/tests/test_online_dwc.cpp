#include <doctest.h>

#include <fstream>
#include <sstream>

#include "poa/bandwidth.hpp"
#include "poa/error.hpp"
#include "poa/io.hpp"
#include "poa/online_dwc.hpp"

using namespace poa;

namespace {

Circuit circ(const RelayTable& t, const char* g, const char* m, const char* e) {
    return Circuit{{t.index_of(g), t.index_of(m), t.index_of(e)}};
}

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Trace fixed_trace(RelayTable relays, std::vector<std::pair<double, double>> iv) {
    Trace t;
    t.relays = std::move(relays);
    DownloadId id = 1;
    for (auto [s, e] : iv) {
        Download d;
        d.id = id++;
        d.mode = FixedInterval{s, e};
        t.downloads.push_back(d);
    }
    return t;
}

}  // namespace

TEST_CASE("empty network picks the highest minimum capacity") {
    RelayTable t({{"A", 100, false}, {"B", 30, false}, {"C", 80, false}, {"E", 90, true}});
    std::vector<Circuit> cands = {circ(t, "A", "B", "E"), circ(t, "A", "C", "E")};
    auto d = select_circuit_dwc(cands, {}, t);
    CHECK(d.index == 1);
    CHECK(d.weight == 0.0);
    CHECK(d.available == 80.0);
}

TEST_CASE("a candidate through an active bottleneck loses to a clean one") {
    RelayTable t({{"A", 100, false}, {"B", 50, false}, {"C", 100, true},
                  {"D", 100, false}, {"F", 100, false}, {"G", 20, true}});
    std::vector<Circuit> active = {circ(t, "A", "B", "C")};
    std::vector<Circuit> cands = {circ(t, "D", "B", "C"), circ(t, "D", "F", "G")};
    auto d = select_circuit_dwc(cands, active, t);
    CHECK(d.index == 1);
    CHECK(d.relay_weights[t.index_of("B")] == doctest::Approx(1.0 / 50));
    CHECK(d.weight == 0.0);
}

TEST_CASE("zero-weight tie goes to the larger minimum residual") {
    RelayTable t({{"A", 100, false}, {"B", 30, false}, {"C", 80, false}, {"E", 200, true}});
    std::vector<Circuit> cands = {circ(t, "A", "B", "E"), circ(t, "A", "C", "E")};
    CHECK(select_circuit_dwc(cands, {}, t).index == 1);
    std::vector<Circuit> twin = {cands[1], cands[1]};
    CHECK(select_circuit_dwc(twin, {}, t).index == 0);
    CHECK_THROWS_AS(select_circuit_dwc({}, {}, t), Error);
}

TEST_CASE("disjoint intervals each see an empty network") {
    RelayTable t({{"A", 100, false}, {"B", 30, false}, {"C", 80, false}, {"E", 90, true}});
    auto trace = fixed_trace(t, {{0, 1}, {2, 3}, {4, 5}});
    std::vector<Circuit> cands = {circ(t, "A", "B", "E"), circ(t, "A", "C", "E")};
    CircuitSet set;
    set.circuits = cands;
    std::vector<CircuitSet> sets(3, set);
    auto a = process_trace_online(trace, sets);
    for (DownloadId id = 1; id <= 3; ++id) CHECK(a.at(id) == cands[1]);
}

TEST_CASE("simultaneous starts are processed in id order") {
    RelayTable t({{"A", 100, false}, {"B", 100, false}, {"C", 100, false}, {"D", 100, false},
                  {"E", 100, true}, {"F", 60, true}});
    auto trace = fixed_trace(t, {{0, 5}, {0, 5}});
    CircuitSet set;
    set.circuits = {circ(t, "A", "B", "E"), circ(t, "C", "D", "F")};
    std::vector<CircuitSet> sets(2, set);
    auto a = process_trace_online(trace, sets);
    CHECK(a.at(1) == set.circuits[0]);
    // The second download sees the first on A-B-E and avoids its bottleneck.
    CHECK(a.at(2) == set.circuits[1]);
}

TEST_CASE("a download ending exactly at another's start is expired") {
    RelayTable t({{"A", 100, false}, {"B", 100, false}, {"C", 100, false}, {"D", 100, false},
                  {"E", 100, true}, {"F", 60, true}});
    auto trace = fixed_trace(t, {{0, 5}, {5, 9}});
    CircuitSet set;
    set.circuits = {circ(t, "A", "B", "E"), circ(t, "C", "D", "F")};
    std::vector<CircuitSet> sets(2, set);
    auto a = process_trace_online(trace, sets);
    CHECK(a.at(2) == set.circuits[0]);
}

TEST_CASE("three-download golden trace") {
    const std::string dir = POA_GOLDEN_DIR;
    auto trace = io::trace_from_json(io::read_json(dir + "/dwc_trace.json"));
    auto a = process_trace_online(trace, trace.original_sets);
    io::SolutionDoc sol{"online_dwc", "original", std::nullopt, a};
    CHECK(io::solution_to_json(sol, trace.relays).dump(2) + "\n" == slurp(dir + "/dwc_solution.json"));
}

TEST_CASE("exit-sharing circuit is never chosen while both originals run") {
    RelayTable t({{"E1", 10, true}, {"E2", 10, true}, {"E3", 10, true}, {"G1", 20, false},
                  {"G2", 20, false}, {"G3", 20, false}, {"M1", 20, false}, {"M2", 20, false},
                  {"M3", 20, false}});
    std::vector<Circuit> active = {circ(t, "G1", "M1", "E1"), circ(t, "G2", "M2", "E2")};
    const Circuit sharing = circ(t, "G3", "E1", "E2");
    for (const auto* alt : {"E3", "E1", "E2"}) {
        const Circuit other = circ(t, "G3", "M3", alt);
        std::vector<Circuit> cands = {sharing, other};
        CHECK(select_circuit_dwc(cands, active, t).index == 1);
    }
}

#include "poa/fixtures.hpp"

namespace poa {

ExperimentConfig standard_fixture(PolicyKind policy, std::uint64_t seed) {
    ExperimentConfig cfg;
    cfg.relays = make_relay_fixture(20, 6, 250.0, 5000.0, 7);
    cfg.clients.web = 90;
    cfg.clients.bulk = 10;
    cfg.policy = policy;
    cfg.duration_s = 900.0;
    cfg.tick_s = 1.0;
    cfg.seed = seed;
    return cfg;
}

ExperimentConfig minimal_fixture(PolicyKind policy, std::uint64_t seed) {
    ExperimentConfig cfg;
    cfg.relays = RelayTable({{"guard", 400.0, false}, {"middle", 500.0, false}, {"exit", 320.0, true}});
    cfg.clients.web = 1;
    cfg.policy = policy;
    cfg.circuits_per_client = 1;
    cfg.model.start_spread_s = 0.0;
    cfg.duration_s = 30.0;
    cfg.seed = seed;
    return cfg;
}

}  // namespace poa

#pragma once

// Ready-made experiment configurations shared by the CLI and the tests.

#include <cstdint>

#include "poa/sim.hpp"

namespace poa {

/// 20 heterogeneous relays, 100 clients (web and bulk), 900 s at 1 s ticks.
ExperimentConfig standard_fixture(PolicyKind policy, std::uint64_t seed);

/// Three relays and a single web client; finishes in a few ticks.
ExperimentConfig minimal_fixture(PolicyKind policy, std::uint64_t seed);

}  // namespace poa

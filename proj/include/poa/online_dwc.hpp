#pragma once

// Serial centralized circuit selection by delay-weighted capacity.

#include <cstddef>
#include <span>
#include <vector>

#include "poa/model.hpp"

namespace poa {

struct DwcDecision {
    std::size_t index = 0;              // into the candidate list
    double weight = 0.0;                // summed relay weight of the winner
    double available = 0.0;             // min residual over the winner's relays
    std::vector<double> relay_weights;  // weights the decision was based on
};

/// Allocates the active circuits with weight accumulation, then picks the
/// candidate with the lowest summed relay weight. Ties go to the largest
/// minimum residual, then to the lowest candidate index.
/// Throws Error on an empty candidate list.
DwcDecision select_circuit_dwc(std::span<const Circuit> candidates, std::span<const Circuit> active,
                               const RelayTable& relays);

/// Processes fixed downloads in (start, id) order. A download is active for
/// later arrivals only while its end is strictly after their start.
Assignment process_trace_online(const Trace& trace, std::span<const CircuitSet> candidates);

}  // namespace poa

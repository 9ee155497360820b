#pragma once

// JSON / CSV serialization of relay tables, circuit sets, traces, solutions,
// experiment configs and run metrics.

#include <filesystem>
#include <iosfwd>
#include <string>

#include <json.hpp>

#include "poa/bandwidth.hpp"
#include "poa/genetic.hpp"
#include "poa/model.hpp"
#include "poa/sim.hpp"

namespace poa::io {

using json = nlohmann::json;

/// Version stamped into every document this library writes.
inline constexpr int kSchemaVersion = 1;

json read_json(const std::filesystem::path& path);
void write_json(const std::filesystem::path& path, const json& doc);

/// Array of {id, capacity_kibps, is_exit}.
RelayTable relays_from_json(const json& doc);
json relays_to_json(const RelayTable& relays);

json circuit_to_json(const Circuit& c, const RelayTable& relays);
Circuit circuit_from_json(const json& doc, const RelayTable& relays, const std::string& path);

/// Array of id triples.
json circuit_set_to_json(const CircuitSet& set, const RelayTable& relays);
CircuitSet circuit_set_from_json(const json& doc, const RelayTable& relays, CircuitSetKind kind);

json trace_to_json(const Trace& trace);
Trace trace_from_json(const json& doc);

struct SolutionDoc {
    std::string method;
    std::string circuit_set;
    std::optional<double> fitness;
    Assignment assignment;
};

json solution_to_json(const SolutionDoc& sol, const RelayTable& relays);
SolutionDoc solution_from_json(const json& doc, const RelayTable& relays);

json allocation_to_json(const AllocationResult& r, std::span<const Circuit> circuits, const RelayTable& relays);

/// Parses an experiment config. Relative file references resolve against
/// `base_dir`. Throws ConfigError carrying the offending field path.
ExperimentConfig config_from_json(const json& doc, const std::filesystem::path& base_dir = {});
ExperimentConfig load_config(const std::filesystem::path& path);

/// Self-contained config document: relays, mapping and trace are inlined so
/// the result re-runs without the files it was loaded from.
json config_to_json(const ExperimentConfig& cfg);

json metrics_to_json(const RunMetrics& m);
/// Throws ConfigError on schema mismatch.
RunMetrics metrics_from_json(const json& doc);

void write_bandwidth_csv(std::ostream& out, const RunMetrics& m);
void write_utilization_csv(std::ostream& out, const RunMetrics& m);
void write_weights_csv(std::ostream& out, const RunMetrics& m);
void write_target_csv(std::ostream& out, const std::vector<TargetSample>& series);
void write_selections_jsonl(std::ostream& out, const RunMetrics& m);

/// Checks a document's schema_version, throwing ConfigError on mismatch.
void require_schema(const json& doc, const std::string& what);

}  // namespace poa::io

#include "poa/io.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "poa/error.hpp"

namespace poa::io {

json read_json(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError(path.string(), "cannot open file");
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError(path.string(), std::string("invalid JSON: ") + e.what());
    }
}

void write_json(const std::filesystem::path& path, const json& doc) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path.string());
    out << doc.dump(2) << '\n';
}

void require_schema(const json& doc, const std::string& what) {
    if (!doc.is_object() || !doc.contains("schema_version")) {
        throw ConfigError(what + ".schema_version", "missing schema version");
    }
    if (doc["schema_version"] != kSchemaVersion) {
        throw ConfigError(what + ".schema_version",
                          "unsupported schema version " + doc["schema_version"].dump());
    }
}

namespace {

const json& field(const json& obj, const std::string& key, const std::string& path) {
    if (!obj.is_object() || !obj.contains(key)) throw ConfigError(path + "." + key, "missing field");
    return obj[key];
}

double number(const json& v, const std::string& path) {
    if (!v.is_number()) throw ConfigError(path, "expected a number");
    return v.get<double>();
}

std::size_t count(const json& v, const std::string& path) {
    if (!v.is_number_integer() || v.get<long long>() < 0) {
        throw ConfigError(path, "expected a nonnegative integer");
    }
    return v.get<std::size_t>();
}

std::string text(const json& v, const std::string& path) {
    if (!v.is_string()) throw ConfigError(path, "expected a string");
    return v.get<std::string>();
}

bool boolean(const json& v, const std::string& path) {
    if (!v.is_boolean()) throw ConfigError(path, "expected a boolean");
    return v.get<bool>();
}

void reject_unknown(const json& obj, std::initializer_list<const char*> known, const std::string& path) {
    if (!obj.is_object()) throw ConfigError(path, "expected an object");
    std::set<std::string> allowed(known.begin(), known.end());
    for (const auto& [k, v] : obj.items()) {
        if (!allowed.count(k)) throw ConfigError(path + "." + k, "unknown field");
    }
}

}  // namespace

RelayTable relays_from_json(const json& doc) {
    const json& arr = doc.is_object() && doc.contains("relays") ? doc["relays"] : doc;
    if (!arr.is_array()) throw ConfigError("relays", "expected an array");
    std::vector<Relay> relays;
    for (std::size_t i = 0; i < arr.size(); ++i) {
        const std::string p = "relays[" + std::to_string(i) + "]";
        const auto& r = arr[i];
        Relay relay;
        relay.id = text(field(r, "id", p), p + ".id");
        relay.capacity = number(field(r, "capacity_kibps", p), p + ".capacity_kibps");
        relay.is_exit = boolean(field(r, "is_exit", p), p + ".is_exit");
        relays.push_back(std::move(relay));
    }
    return RelayTable(std::move(relays));
}

json relays_to_json(const RelayTable& relays) {
    json arr = json::array();
    for (const auto& r : relays.relays()) {
        arr.push_back({{"id", r.id}, {"capacity_kibps", r.capacity}, {"is_exit", r.is_exit}});
    }
    return arr;
}

json circuit_to_json(const Circuit& c, const RelayTable& relays) {
    return json::array({relays.at(c.hops[0]).id, relays.at(c.hops[1]).id, relays.at(c.hops[2]).id});
}

Circuit circuit_from_json(const json& doc, const RelayTable& relays, const std::string& path) {
    if (!doc.is_array() || doc.size() != 3) throw ConfigError(path, "expected an id triple");
    Circuit c;
    for (std::size_t i = 0; i < 3; ++i) {
        const auto id = text(doc[i], path + "[" + std::to_string(i) + "]");
        auto idx = relays.find(id);
        if (!idx) throw ConfigError(path + "[" + std::to_string(i) + "]", "unknown relay '" + id + "'");
        c.hops[i] = *idx;
    }
    return c;
}

json circuit_set_to_json(const CircuitSet& set, const RelayTable& relays) {
    json arr = json::array();
    for (const auto& c : set.circuits) arr.push_back(circuit_to_json(c, relays));
    return arr;
}

CircuitSet circuit_set_from_json(const json& doc, const RelayTable& relays, CircuitSetKind kind) {
    if (!doc.is_array()) throw ConfigError("circuits", "expected an array");
    CircuitSet set;
    set.kind = kind;
    for (std::size_t i = 0; i < doc.size(); ++i) {
        set.circuits.push_back(circuit_from_json(doc[i], relays, "circuits[" + std::to_string(i) + "]"));
    }
    return set;
}

json trace_to_json(const Trace& trace) {
    json downloads = json::array();
    for (std::size_t i = 0; i < trace.downloads.size(); ++i) {
        const auto& d = trace.downloads[i];
        json e = {{"id", d.id}, {"client", d.client}, {"start_s", d.interval().start_s},
                  {"end_s", d.interval().end_s}};
        if (d.circuit) e["circuit"] = circuit_to_json(*d.circuit, trace.relays);
        e["candidates"] = i < trace.original_sets.size()
                              ? circuit_set_to_json(trace.original_sets[i], trace.relays)
                              : json::array();
        downloads.push_back(std::move(e));
    }
    return {{"schema_version", kSchemaVersion},
            {"kind", "trace"},
            {"relays", relays_to_json(trace.relays)},
            {"downloads", std::move(downloads)}};
}

Trace trace_from_json(const json& doc) {
    require_schema(doc, "trace");
    Trace trace;
    trace.relays = relays_from_json(field(doc, "relays", "trace"));
    const auto& arr = field(doc, "downloads", "trace");
    if (!arr.is_array()) throw ConfigError("trace.downloads", "expected an array");
    for (std::size_t i = 0; i < arr.size(); ++i) {
        const std::string p = "trace.downloads[" + std::to_string(i) + "]";
        const auto& e = arr[i];
        Download d;
        d.id = count(field(e, "id", p), p + ".id");
        d.client = static_cast<ClientId>(count(field(e, "client", p), p + ".client"));
        d.mode = FixedInterval{number(field(e, "start_s", p), p + ".start_s"),
                               number(field(e, "end_s", p), p + ".end_s")};
        if (e.contains("circuit")) d.circuit = circuit_from_json(e["circuit"], trace.relays, p + ".circuit");
        check_download(d);
        CircuitSet set;
        if (e.contains("candidates")) {
            const auto& cands = e["candidates"];
            if (!cands.is_array()) throw ConfigError(p + ".candidates", "expected an array");
            for (std::size_t k = 0; k < cands.size(); ++k) {
                set.circuits.push_back(
                    circuit_from_json(cands[k], trace.relays, p + ".candidates[" + std::to_string(k) + "]"));
            }
        }
        trace.downloads.push_back(std::move(d));
        trace.original_sets.push_back(std::move(set));
    }
    return trace;
}

json solution_to_json(const SolutionDoc& sol, const RelayTable& relays) {
    json arr = json::array();
    for (const auto& [id, c] : sol.assignment) {
        arr.push_back({{"download", id}, {"circuit", circuit_to_json(c, relays)}});
    }
    json doc = {{"schema_version", kSchemaVersion},
                {"kind", "solution"},
                {"method", sol.method},
                {"circuit_set", sol.circuit_set},
                {"assignment", std::move(arr)}};
    if (sol.fitness) doc["fitness"] = *sol.fitness;
    return doc;
}

SolutionDoc solution_from_json(const json& doc, const RelayTable& relays) {
    require_schema(doc, "solution");
    SolutionDoc sol;
    if (doc.contains("method")) sol.method = text(doc["method"], "solution.method");
    if (doc.contains("circuit_set")) sol.circuit_set = text(doc["circuit_set"], "solution.circuit_set");
    if (doc.contains("fitness")) sol.fitness = number(doc["fitness"], "solution.fitness");
    const auto& arr = field(doc, "assignment", "solution");
    if (!arr.is_array()) throw ConfigError("solution.assignment", "expected an array");
    for (std::size_t i = 0; i < arr.size(); ++i) {
        const std::string p = "solution.assignment[" + std::to_string(i) + "]";
        const auto id = count(field(arr[i], "download", p), p + ".download");
        sol.assignment[id] = circuit_from_json(field(arr[i], "circuit", p), relays, p + ".circuit");
    }
    return sol;
}

json allocation_to_json(const AllocationResult& r, std::span<const Circuit> circuits, const RelayTable& relays) {
    json cs = json::array();
    for (std::size_t i = 0; i < circuits.size(); ++i) {
        cs.push_back({{"circuit", circuit_to_json(circuits[i], relays)},
                      {"bw_kibps", r.circuit_bw[i]},
                      {"bottleneck", relays.at(r.bottleneck_of[i]).id}});
    }
    json weights = json::object();
    for (RelayIndex i = 0; i < relays.size(); ++i) weights[relays[i].id] = r.relay_weights[i];
    return {{"schema_version", kSchemaVersion},
            {"kind", "allocation"},
            {"circuits", std::move(cs)},
            {"relay_weights", std::move(weights)},
            {"total_kibps", r.total()}};
}

ExperimentConfig config_from_json(const json& doc, const std::filesystem::path& base_dir) {
    require_schema(doc, "config");
    reject_unknown(doc,
                   {"schema_version", "relays", "clients", "client_model", "policy", "estimator", "trace",
                    "circuits_per_client", "tick_s", "duration_s", "seed", "history_s", "attack"},
                   "config");
    auto resolve = [&](const std::string& p) {
        std::filesystem::path path(p);
        return path.is_absolute() ? path : base_dir / path;
    };
    ExperimentConfig cfg;

    const auto& relays = field(doc, "relays", "config");
    if (relays.is_string()) {
        cfg.relays = relays_from_json(read_json(resolve(relays.get<std::string>())));
    } else {
        cfg.relays = relays_from_json(relays);
    }

    if (doc.contains("clients")) {
        const auto& c = doc["clients"];
        reject_unknown(c, {"web", "bulk", "perf_50k", "perf_1m", "perf_5m"}, "config.clients");
        if (c.contains("web")) cfg.clients.web = count(c["web"], "config.clients.web");
        if (c.contains("bulk")) cfg.clients.bulk = count(c["bulk"], "config.clients.bulk");
        if (c.contains("perf_50k")) cfg.clients.perf_50k = count(c["perf_50k"], "config.clients.perf_50k");
        if (c.contains("perf_1m")) cfg.clients.perf_1m = count(c["perf_1m"], "config.clients.perf_1m");
        if (c.contains("perf_5m")) cfg.clients.perf_5m = count(c["perf_5m"], "config.clients.perf_5m");
    }
    if (doc.contains("client_model")) {
        const auto& m = doc["client_model"];
        const std::string p = "config.client_model";
        reject_unknown(m, {"web_size_kib", "web_pause_ms", "bulk_size_kib", "perf_pause_ms", "start_spread_s"}, p);
        if (m.contains("web_size_kib")) cfg.model.web_size_kib = number(m["web_size_kib"], p + ".web_size_kib");
        if (m.contains("web_pause_ms")) {
            const auto& r = m["web_pause_ms"];
            if (!r.is_array() || r.size() != 2) throw ConfigError(p + ".web_pause_ms", "expected [min, max]");
            cfg.model.web_pause_min_ms = number(r[0], p + ".web_pause_ms[0]");
            cfg.model.web_pause_max_ms = number(r[1], p + ".web_pause_ms[1]");
        }
        if (m.contains("bulk_size_kib")) cfg.model.bulk_size_kib = number(m["bulk_size_kib"], p + ".bulk_size_kib");
        if (m.contains("perf_pause_ms")) cfg.model.perf_pause_ms = number(m["perf_pause_ms"], p + ".perf_pause_ms");
        if (m.contains("start_spread_s")) cfg.model.start_spread_s = number(m["start_spread_s"], p + ".start_spread_s");
    }

    if (doc.contains("policy")) {
        const auto& p = doc["policy"];
        if (p.is_string()) {
            cfg.policy = parse_policy(p.get<std::string>());
        } else if (p.is_object()) {
            reject_unknown(p, {"kind", "mapping"}, "config.policy");
            cfg.policy = parse_policy(text(field(p, "kind", "config.policy"), "config.policy.kind"));
            if (p.contains("mapping")) {
                const auto& m = p["mapping"];
                const json doc = m.is_object() ? m : read_json(resolve(text(m, "config.policy.mapping")));
                cfg.mapping = solution_from_json(doc, cfg.relays).assignment;
            }
        } else {
            throw ConfigError("config.policy", "expected a string or object");
        }
    }
    if (doc.contains("estimator")) {
        const auto& e = doc["estimator"];
        const std::string p = "config.estimator";
        reject_unknown(e, {"window_s", "granularity_ms", "method", "tau", "threshold"}, p);
        if (e.contains("window_s")) cfg.estimator.window_s = number(e["window_s"], p + ".window_s");
        if (e.contains("granularity_ms")) {
            cfg.estimator.granularity_ms = static_cast<int>(count(e["granularity_ms"], p + ".granularity_ms"));
        }
        if (e.contains("method")) cfg.estimator.method = parse_cluster_method(text(e["method"], p + ".method"));
        if (e.contains("tau")) cfg.estimator.tau = number(e["tau"], p + ".tau");
        if (e.contains("threshold")) cfg.estimator.threshold = number(e["threshold"], p + ".threshold");
    }
    if (doc.contains("trace")) {
        const auto& t = doc["trace"];
        cfg.fixed_trace = trace_from_json(t.is_object() ? t : read_json(resolve(text(t, "config.trace"))));
    }
    if (doc.contains("circuits_per_client")) {
        cfg.circuits_per_client = count(doc["circuits_per_client"], "config.circuits_per_client");
    }
    if (doc.contains("tick_s")) cfg.tick_s = number(doc["tick_s"], "config.tick_s");
    if (doc.contains("duration_s")) cfg.duration_s = number(doc["duration_s"], "config.duration_s");
    if (doc.contains("seed")) cfg.seed = count(doc["seed"], "config.seed");
    if (doc.contains("history_s")) cfg.history_s = number(doc["history_s"], "config.history_s");
    if (doc.contains("attack")) {
        const auto& a = doc["attack"];
        const std::string p = "config.attack";
        reject_unknown(a, {"target", "flows", "start_s", "end_s"}, p);
        AttackConfig atk;
        atk.target = text(field(a, "target", p), p + ".target");
        if (a.contains("flows")) atk.flows = count(a["flows"], p + ".flows");
        if (a.contains("start_s")) atk.start_s = number(a["start_s"], p + ".start_s");
        if (a.contains("end_s")) atk.end_s = number(a["end_s"], p + ".end_s");
        cfg.attack = atk;
    }
    cfg.validate();
    return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    return config_from_json(read_json(path), path.parent_path());
}

json config_to_json(const ExperimentConfig& cfg) {
    json doc = {{"schema_version", kSchemaVersion},
                {"relays", relays_to_json(cfg.relays)},
                {"clients",
                 {{"web", cfg.clients.web},
                  {"bulk", cfg.clients.bulk},
                  {"perf_50k", cfg.clients.perf_50k},
                  {"perf_1m", cfg.clients.perf_1m},
                  {"perf_5m", cfg.clients.perf_5m}}},
                {"client_model",
                 {{"web_size_kib", cfg.model.web_size_kib},
                  {"web_pause_ms", {cfg.model.web_pause_min_ms, cfg.model.web_pause_max_ms}},
                  {"bulk_size_kib", cfg.model.bulk_size_kib},
                  {"perf_pause_ms", cfg.model.perf_pause_ms},
                  {"start_spread_s", cfg.model.start_spread_s}}},
                {"estimator",
                 {{"window_s", cfg.estimator.window_s},
                  {"granularity_ms", cfg.estimator.granularity_ms},
                  {"method", std::string(to_string(cfg.estimator.method))},
                  {"tau", cfg.estimator.tau},
                  {"threshold", cfg.estimator.threshold}}},
                {"circuits_per_client", cfg.circuits_per_client},
                {"tick_s", cfg.tick_s},
                {"duration_s", cfg.duration_s},
                {"seed", cfg.seed},
                {"history_s", cfg.history_s}};
    json policy = {{"kind", std::string(to_string(cfg.policy))}};
    if (!cfg.mapping.empty()) {
        SolutionDoc sol;
        sol.assignment = cfg.mapping;
        policy["mapping"] = solution_to_json(sol, cfg.relays);
    }
    doc["policy"] = std::move(policy);
    if (cfg.fixed_trace) doc["trace"] = trace_to_json(*cfg.fixed_trace);
    if (cfg.attack) {
        json a = {{"target", cfg.attack->target}, {"flows", cfg.attack->flows}, {"start_s", cfg.attack->start_s}};
        if (cfg.attack->end_s) a["end_s"] = *cfg.attack->end_s;
        doc["attack"] = std::move(a);
    }
    return doc;
}

namespace {

json opt(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

}  // namespace

json metrics_to_json(const RunMetrics& m) {
    json downloads = json::array();
    for (const auto& d : m.downloads) {
        downloads.push_back({{"id", d.id},
                             {"client", d.client},
                             {"kind", std::string(to_string(d.kind))},
                             {"size_kib", d.size_kib},
                             {"start_s", d.start_s},
                             {"first_byte_s", opt(d.first_byte_s)},
                             {"end_s", opt(d.end_s)},
                             {"delivered_kib", d.delivered_kib},
                             {"circuit", circuit_to_json(d.circuit, m.relays)}});
    }
    json util = json::array();
    for (const auto& row : m.utilization) util.push_back(row);
    json gossip = json::array();
    for (const auto& g : m.gossip) {
        gossip.push_back({g.t, m.relays.at(g.relay).id, g.weight, g.bottlenecks, g.active_circuits});
    }
    return {{"schema_version", kSchemaVersion},
            {"kind", "metrics"},
            {"policy", m.policy},
            {"seed", m.seed},
            {"tick_s", m.tick_s},
            {"duration_s", m.duration_s},
            {"relays", relays_to_json(m.relays)},
            {"tick_time", m.tick_time},
            {"client_bw_kibps", m.client_bw_kibps},
            {"delivered_kib", m.delivered_kib},
            {"utilization", std::move(util)},
            {"downloads", std::move(downloads)},
            {"gossip", std::move(gossip)},
            {"summary",
             {{"total_delivered_kib", m.total_delivered_kib()},
              {"completed_downloads", m.completed_downloads()},
              {"downloads", m.downloads.size()}}}};
}

RunMetrics metrics_from_json(const json& doc) {
    require_schema(doc, "metrics");
    RunMetrics m;
    m.policy = text(field(doc, "policy", "metrics"), "metrics.policy");
    m.seed = count(field(doc, "seed", "metrics"), "metrics.seed");
    m.tick_s = number(field(doc, "tick_s", "metrics"), "metrics.tick_s");
    m.duration_s = number(field(doc, "duration_s", "metrics"), "metrics.duration_s");
    m.relays = relays_from_json(field(doc, "relays", "metrics"));
    m.tick_time = field(doc, "tick_time", "metrics").get<std::vector<double>>();
    m.client_bw_kibps = field(doc, "client_bw_kibps", "metrics").get<std::vector<double>>();
    m.delivered_kib = field(doc, "delivered_kib", "metrics").get<std::vector<double>>();
    m.utilization = field(doc, "utilization", "metrics").get<std::vector<std::vector<double>>>();
    for (const auto& d : field(doc, "downloads", "metrics")) {
        DownloadRecord r;
        r.id = d["id"].get<DownloadId>();
        r.client = d["client"].get<ClientId>();
        const auto kind = d["kind"].get<std::string>();
        for (auto k : {ClientKind::web, ClientKind::bulk, ClientKind::perf_50k, ClientKind::perf_1m,
                       ClientKind::perf_5m, ClientKind::fixed}) {
            if (kind == to_string(k)) r.kind = k;
        }
        r.size_kib = d["size_kib"].get<double>();
        r.start_s = d["start_s"].get<double>();
        if (!d["first_byte_s"].is_null()) r.first_byte_s = d["first_byte_s"].get<double>();
        if (!d["end_s"].is_null()) r.end_s = d["end_s"].get<double>();
        r.delivered_kib = d["delivered_kib"].get<double>();
        r.circuit = circuit_from_json(d["circuit"], m.relays, "metrics.downloads.circuit");
        m.downloads.push_back(std::move(r));
    }
    if (doc.contains("gossip")) {
        for (const auto& g : doc["gossip"]) {
            m.gossip.push_back({g[0].get<double>(), m.relays.index_of(g[1].get<std::string>()), g[2].get<double>(),
                                g[3].get<std::size_t>(), g[4].get<std::size_t>()});
        }
    }
    return m;
}

void write_bandwidth_csv(std::ostream& out, const RunMetrics& m) {
    out << "t,client_bw_kibps,delivered_kib\n";
    for (std::size_t i = 0; i < m.tick_time.size(); ++i) {
        out << json(m.tick_time[i]).dump() << ',' << json(m.client_bw_kibps[i]).dump() << ','
            << json(m.delivered_kib[i]).dump() << '\n';
    }
}

void write_utilization_csv(std::ostream& out, const RunMetrics& m) {
    out << "t,relay_id,utilization\n";
    for (std::size_t i = 0; i < m.tick_time.size(); ++i) {
        for (RelayIndex r = 0; r < m.relays.size(); ++r) {
            out << json(m.tick_time[i]).dump() << ',' << m.relays[r].id << ','
                << json(m.utilization[i][r]).dump() << '\n';
        }
    }
}

void write_weights_csv(std::ostream& out, const RunMetrics& m) {
    out << "t,relay_id,weight,n_bottlenecks\n";
    for (const auto& g : m.gossip) {
        out << json(g.t).dump() << ',' << m.relays.at(g.relay).id << ',' << json(g.weight).dump() << ','
            << g.bottlenecks << '\n';
    }
}

void write_target_csv(std::ostream& out, const std::vector<TargetSample>& series) {
    out << "t,target_weight,attack_kibps,client_circuits,completed_downloads\n";
    for (const auto& s : series) {
        out << json(s.t).dump() << ',' << json(s.weight).dump() << ',' << json(s.attack_kibps).dump() << ','
            << s.client_circuits << ',' << s.completed << '\n';
    }
}

void write_selections_jsonl(std::ostream& out, const RunMetrics& m) {
    for (const auto& s : m.selections) {
        json w = json::object();
        for (const auto& [r, v] : s.weights) w[m.relays.at(r).id] = v;
        json cands = json::array();
        for (const auto& c : s.candidates) cands.push_back(circuit_to_json(c, m.relays));
        json line = {{"download", s.download}, {"client", s.client},  {"t", s.t},
                     {"candidates", cands},    {"chosen", s.chosen}, {"weights", w}};
        out << line.dump() << '\n';
    }
}

}  // namespace poa::io

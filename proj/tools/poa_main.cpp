// poa: command-line driver for circuit-selection experiments.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "poa/adversary.hpp"
#include "poa/error.hpp"
#include "poa/fixtures.hpp"
#include "poa/genetic.hpp"
#include "poa/io.hpp"
#include "poa/online_dwc.hpp"
#include "poa/report.hpp"
#include "poa/sim.hpp"

namespace fs = std::filesystem;
using poa::io::json;

namespace {

struct GlobalOpts {
    std::optional<std::uint64_t> seed;
    std::optional<double> tick_s;
    std::string out;
};

std::ofstream open_out(const fs::path& p) {
    std::ofstream f(p);
    if (!f) throw poa::Error("cannot write " + p.string());
    return f;
}

void apply_overrides(poa::ExperimentConfig& cfg, const GlobalOpts& g) {
    if (g.seed) cfg.seed = *g.seed;
    if (g.tick_s) cfg.tick_s = *g.tick_s;
}

poa::ExperimentConfig config_or_fixture(const std::string& path, poa::PolicyKind policy, const GlobalOpts& g) {
    poa::ExperimentConfig cfg = path.empty() ? poa::standard_fixture(policy, 1) : poa::io::load_config(path);
    apply_overrides(cfg, g);
    cfg.validate();
    return cfg;
}

json opt_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

int cmd_run(const std::string& config_path, const std::string& policy, const GlobalOpts& g) {
    auto cfg = poa::io::load_config(config_path);
    if (!policy.empty()) cfg.policy = poa::parse_policy(policy);
    apply_overrides(cfg, g);
    cfg.validate();
    const fs::path out = g.out.empty() ? fs::path("out") : fs::path(g.out);
    fs::create_directories(out);

    const auto metrics = poa::run(cfg);
    poa::io::write_json(out / "config.json", poa::io::config_to_json(cfg));
    poa::io::write_json(out / "metrics.json", poa::io::metrics_to_json(metrics));
    {
        auto f = open_out(out / "bandwidth.csv");
        poa::io::write_bandwidth_csv(f, metrics);
    }
    {
        auto f = open_out(out / "utilization.csv");
        poa::io::write_utilization_csv(f, metrics);
    }
    {
        auto f = open_out(out / "selections.jsonl");
        poa::io::write_selections_jsonl(f, metrics);
    }
    if (!metrics.gossip.empty()) {
        auto f = open_out(out / "weights.csv");
        poa::io::write_weights_csv(f, metrics);
    }
    if (!metrics.target.empty()) {
        auto f = open_out(out / "target.csv");
        poa::io::write_target_csv(f, metrics.target);
    }
    if (!metrics.selections.empty()) {
        const auto extracted = poa::extract_fixed_trace(metrics);
        poa::io::write_json(out / "trace.json", poa::io::trace_to_json(extracted.trace));
        if (extracted.dropped > 0) {
            std::cerr << "note: " << extracted.dropped << " incomplete downloads left out of trace.json\n";
        }
    }
    std::cout << metrics.policy << " seed=" << metrics.seed << ' '
              << poa::report::summary_line(poa::report::summarize(metrics)) << '\n';
    return 0;
}

int cmd_compare(const std::vector<std::string>& dirs, const GlobalOpts& g) {
    std::vector<poa::RunMetrics> runs;
    std::vector<std::string> labels;
    for (const auto& d : dirs) {
        const fs::path p = fs::is_directory(d) ? fs::path(d) / "metrics.json" : fs::path(d);
        runs.push_back(poa::io::metrics_from_json(poa::io::read_json(p)));
        labels.push_back(d);
    }
    const auto cmp = poa::report::compare_runs(runs, labels);
    for (const auto& w : cmp.warnings) std::cerr << "warning: " << w << '\n';
    for (std::size_t i = 0; i < labels.size(); ++i) {
        std::cout << labels[i] << ": " << poa::report::summary_line(cmp.summaries[i]) << '\n';
    }
    std::printf("%-16s %-24s %14s %14s %10s\n", "metric", "run", "median", "base", "delta%");
    for (const auto& d : cmp.deltas) {
        auto num = [](const std::optional<double>& v) {
            char buf[32];
            if (v) std::snprintf(buf, sizeof buf, "%.3f", *v); else std::snprintf(buf, sizeof buf, "n/a");
            return std::string(buf);
        };
        std::printf("%-16s %-24s %14s %14s %10s\n", d.metric.c_str(), cmp.labels[d.run].c_str(),
                    num(d.value).c_str(), num(d.base).c_str(), num(d.percent).c_str());
    }
    if (!g.out.empty()) {
        const fs::path out(g.out);
        fs::create_directories(out);
        json deltas = json::array();
        for (const auto& d : cmp.deltas) {
            deltas.push_back({{"metric", d.metric},
                              {"run", cmp.labels[d.run]},
                              {"median", opt_json(d.value)},
                              {"base", opt_json(d.base)},
                              {"percent", opt_json(d.percent)}});
        }
        poa::io::write_json(out / "compare.json", {{"schema_version", poa::io::kSchemaVersion},
                                                   {"kind", "comparison"},
                                                   {"runs", cmp.labels},
                                                   {"horizon_s", cmp.horizon_s},
                                                   {"warnings", cmp.warnings},
                                                   {"deltas", deltas}});
        auto f = open_out(out / "cdf.csv");
        f << "metric,run,quantile,value\n";
        const auto& names = poa::report::metric_names();
        for (std::size_t m = 0; m < names.size(); ++m) {
            for (std::size_t r = 0; r < cmp.labels.size(); ++r) {
                const auto& q = cmp.cdfs[m][r];
                for (std::size_t i = 0; i < q.size(); ++i) {
                    const double p = q.size() == 1 ? 0.5 : static_cast<double>(i) / static_cast<double>(q.size() - 1);
                    f << names[m] << ',' << cmp.labels[r] << ',' << json(p).dump() << ',' << json(q[i]).dump()
                      << '\n';
                }
            }
        }
    }
    return 0;
}

int cmd_sweep(const std::string& config_path, double probe_interval, const GlobalOpts& g) {
    auto cfg = config_or_fixture(config_path, poa::PolicyKind::central_dwc, g);
    poa::report::SweepOptions opts;
    opts.probe_interval_s = probe_interval;
    opts.baseline_seed = cfg.seed;
    const auto res = poa::report::run_sweep(cfg, opts);

    std::printf("%-12s", "method");
    for (int gr : opts.granularities_ms) {
        for (double w : opts.windows_s) std::printf(" g=%4dms,w=%2.0fs", gr, w);
    }
    std::printf("\n");
    for (auto m : opts.methods) {
        std::printf("%-12s", std::string(poa::to_string(m)).c_str());
        for (int gr : opts.granularities_ms) {
            for (double w : opts.windows_s) std::printf(" %15.4f", res.cell(m, gr, w).mse);
        }
        std::printf("\n");
    }
    std::printf("%-12s %15.4f\n", "baseline", res.baseline_mse);
    std::printf("probes=%zu pairs=%zu\n", res.probes, res.baseline_pairs);

    if (!g.out.empty()) {
        fs::create_directories(g.out);
        auto f = open_out(fs::path(g.out) / "sweep.csv");
        f << "method,granularity_ms,window_s,mse,pairs\n";
        for (const auto& c : res.cells) {
            f << poa::to_string(c.method) << ',' << c.granularity_ms << ',' << json(c.window_s).dump() << ','
              << json(c.mse).dump() << ',' << c.pairs << '\n';
        }
        f << "weighted_random,,," << json(res.baseline_mse).dump() << ',' << res.baseline_pairs << '\n';
    }
    return 0;
}

std::vector<poa::CircuitSet> candidate_sets(const poa::Trace& trace, const std::string& kind) {
    const auto k = poa::parse_circuit_set_kind(kind);
    if (k == poa::CircuitSetKind::original) return trace.original_sets;
    const auto set = k == poa::CircuitSetKind::full ? poa::build_full_set(trace.relays)
                                                    : poa::build_pruned_set(trace.relays);
    if (set.degenerate) std::cerr << "warning: " << kind << " circuit set is degenerate\n";
    return std::vector<poa::CircuitSet>(trace.downloads.size(), set);
}

void write_solution(const std::string& path, const poa::io::SolutionDoc& sol, const poa::Trace& trace) {
    if (path.empty()) {
        std::cout << poa::io::solution_to_json(sol, trace.relays).dump(2) << '\n';
    } else {
        poa::io::write_json(path, poa::io::solution_to_json(sol, trace.relays));
    }
}

int cmd_ga(const std::string& trace_path, const std::string& circuits, poa::GaParams params, const GlobalOpts& g) {
    const auto trace = poa::io::trace_from_json(poa::io::read_json(trace_path));
    if (g.seed) params.seed = *g.seed;
    if (g.tick_s) params.tick_s = *g.tick_s;
    params.validate();
    const auto sets = candidate_sets(trace, circuits);
    const auto res = poa::run_genetic(trace, sets, params);
    poa::io::SolutionDoc sol{"ga", circuits, res.best.fitness, poa::to_assignment(res.best, trace)};
    write_solution(g.out, sol, trace);
    std::cerr << "ga best fitness " << json(*res.best.fitness).dump() << " KiB after " << params.generations
              << " generations\n";
    return 0;
}

int cmd_dwc(const std::string& trace_path, const std::string& circuits, const GlobalOpts& g) {
    const auto trace = poa::io::trace_from_json(poa::io::read_json(trace_path));
    const auto sets = candidate_sets(trace, circuits);
    const auto assignment = poa::process_trace_online(trace, sets);
    poa::Solution s;
    for (const auto& d : trace.downloads) s.assignment.push_back(assignment.at(d.id));
    const double fitness = poa::evaluate(s, trace, g.tick_s.value_or(1.0));
    poa::io::SolutionDoc sol{"online_dwc", circuits, std::nullopt, assignment};
    write_solution(g.out, sol, trace);
    std::cerr << "online dwc fitness " << json(fitness).dump() << " KiB\n";
    return 0;
}

int cmd_attack_dos(const std::string& config_path, const std::string& target, std::size_t n,
                   const std::string& policy, double start_s, double settle_s, const GlobalOpts& g) {
    auto cfg = config_or_fixture(config_path, poa::parse_policy(policy), g);
    cfg.policy = poa::parse_policy(policy);
    const auto rep = poa::run_dos(cfg, target, n, start_s, settle_s);
    std::printf("policy=%s target=%s n=%zu expected_weight=%.6f steady_weight=%.6f "
                "completed_before=%zu completed_during=%zu\n",
                rep.policy.c_str(), target.c_str(), n, rep.n_squared_over_bw, rep.steady_weight,
                rep.completed_before, rep.completed_during);
    if (!g.out.empty()) {
        fs::create_directories(g.out);
        auto f = open_out(fs::path(g.out) / "target.csv");
        poa::io::write_target_csv(f, rep.series);
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Circuit-selection experiments: simulation, offline search and privacy analyses"};
    app.require_subcommand(1);
    GlobalOpts g;
    app.add_option("--seed", g.seed, "Override the random seed");
    app.add_option("--tick-s", g.tick_s, "Override the tick length in seconds");
    app.add_option("--out", g.out, "Output directory (or file for ga/dwc)");

    auto* run = app.add_subcommand("run", "Run one experiment config");
    std::string config_path, policy;
    run->add_option("config", config_path, "Experiment config JSON")->required();
    run->add_option("--policy", policy, "Override the policy (vanilla|ga|central_dwc|decentral_dwc)");

    auto* compare = app.add_subcommand("compare", "Compare run output directories");
    std::vector<std::string> dirs;
    compare->add_option("runs", dirs, "Run directories or metrics.json files")->required();

    auto* sweep = app.add_subcommand("sweep", "Estimator accuracy grid");
    double probe_interval = 1.0;
    sweep->add_option("--config", config_path, "Experiment config (default: standard fixture)");
    sweep->add_option("--probe-interval", probe_interval, "Seconds between probes")->check(CLI::PositiveNumber);

    auto* ga = app.add_subcommand("ga", "Offline genetic search over a fixed trace");
    std::string trace_path, circuits = "original";
    poa::GaParams ga_params;
    ga->add_option("--trace", trace_path, "Trace JSON")->required();
    ga->add_option("--circuits", circuits, "original|full|pruned");
    ga->add_option("--pop,--population", ga_params.population);
    ga->add_option("--gens,--generations", ga_params.generations);
    ga->add_option("--b,--breed", ga_params.breed_pct, "Fraction of the population eligible to breed");
    ga->add_option("--e,--elite", ga_params.elite_pct, "Fraction copied unchanged");
    ga->add_option("--m,--mutation", ga_params.mutation_prob, "Per-download mutation probability");

    auto* dwc = app.add_subcommand("dwc", "Online centralized selection over a fixed trace");
    dwc->add_option("--trace", trace_path, "Trace JSON")->required();
    dwc->add_option("--circuits", circuits, "original|full|pruned");

    auto* attack = app.add_subcommand("attack", "Adversarial experiments");
    attack->require_subcommand(1);
    auto* dos = attack->add_subcommand("dos", "Saturate one relay with single-hop flows");
    std::string target, dos_policy = "decentral";
    std::size_t n = 50;
    double start_s = 300.0, settle_s = 10.0;
    dos->add_option("--config", config_path, "Experiment config (default: standard fixture)");
    dos->add_option("--target", target, "Relay id")->required();
    dos->add_option("--n", n, "Number of single-hop flows");
    dos->add_option("--policy", dos_policy, "vanilla|decentral");
    dos->add_option("--start-s", start_s, "Attack start time");
    dos->add_option("--settle-s", settle_s, "Seconds excluded after the start");

    for (auto* sub : {run, compare, sweep, ga, dwc, dos}) {
        sub->add_option("--seed", g.seed, "Override the random seed");
        sub->add_option("--tick-s", g.tick_s, "Override the tick length in seconds");
        sub->add_option("--out", g.out, "Output directory (or file for ga/dwc)");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        if (*run) return cmd_run(config_path, policy, g);
        if (*compare) return cmd_compare(dirs, g);
        if (*sweep) return cmd_sweep(config_path, probe_interval, g);
        if (*ga) return cmd_ga(trace_path, circuits, ga_params, g);
        if (*dwc) return cmd_dwc(trace_path, circuits, g);
        if (*dos) return cmd_attack_dos(config_path, target, n, dos_policy, start_s, settle_s, g);
    } catch (const poa::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    }
    return 0;
}

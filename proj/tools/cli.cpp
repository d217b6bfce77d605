// pdsched command line: trace generation, policy runs, batch studies,
// lower bounds and model export. Human-readable logs go to stderr;
// machine-readable output goes to stdout or to the requested files.

#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "pdsched/gantt.hpp"
#include "pdsched/mip.hpp"
#include "pdsched/offline.hpp"
#include "pdsched/sim.hpp"
#include "pdsched/workload.hpp"

using json = nlohmann::ordered_json;
using namespace pdsched;

namespace {

void add_cost_flags(CLI::App* cmd, CostModelConfig& cfg) {
    cmd->add_option("--prefill-rate", cfg.prefill_rate_ms, "prefill ms per input token");
    cmd->add_option("--prefill-overhead", cfg.prefill_overhead_ms, "prefill stage overhead ms");
    cmd->add_option("--decode-rate", cfg.decode_rate_ms, "decode ms per token per round");
    cmd->add_option("--decode-overhead", cfg.decode_overhead_ms, "decode round overhead ms");
    cmd->add_option("--chunk", cfg.chunk_tokens, "prefill level chunk size (tokens)");
    cmd->add_option("--levels", cfg.max_levels, "number of prefill levels");
}

void add_param_flags(CLI::App* cmd, TraceParams& params) {
    cmd->add_option("--input-mean", params.input_mean, "input token mean");
    cmd->add_option("--input-std", params.input_std, "input token std");
    cmd->add_option("--output-mean", params.output_mean, "output token mean");
    cmd->add_option("--output-std", params.output_std, "output token std");
    cmd->add_option("--output-cap", params.output_cap, "output token cap (0 = uncapped)");
}

void write_file(const std::string& path, const std::string& body) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << body;
}

json metrics_json(const Metrics& m) {
    json pc = json::object();
    for (const auto& [client, busy] : m.per_client_busy_ms)
        pc[std::to_string(client)] = busy;
    return json{{"makespan_s", m.makespan_s},
                {"utilization", m.utilization},
                {"generation_speed", m.generation_speed},
                {"per_client_busy_ms", pc},
                {"bubbles_ms", m.bubbles_ms}};
}

Trace trace_from(const std::string& path, int count, std::uint64_t seed,
                 const TraceParams& params) {
    if (!path.empty()) return load_trace_file(path);
    return generate_trace(count, seed, params);
}

struct RunSpec {
    std::string trace_path;
    int count = 1319;
    std::uint64_t seed = 42;
    TraceParams params;
    int clients = 200;
    CostModelConfig cost;
    std::string policy = "baseline";
    std::string gantt_svg, gantt_csv, metrics_path;
};

// Fills run parameters from the config file. Command-line flags win:
// a field is only taken from the file when its flag was not given.
void apply_config_file(RunSpec& spec, const std::string& path, const CLI::App& cmd) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read " + path);
    json cfg = json::parse(in);
    const auto unset = [&](const char* flag) { return cmd.count(flag) == 0; };
    const auto expect_keys = [](const json& obj, std::initializer_list<const char*> keys,
                                const char* where) {
        for (const auto& [k, _] : obj.items()) {
            bool known = false;
            for (const char* key : keys) known = known || k == key;
            if (!known)
                throw std::runtime_error(std::string("unknown config key ") + where + "." + k);
        }
    };
    expect_keys(cfg, {"trace", "generator", "clients", "cost", "policy", "seed", "outputs"},
                "");
    if (cfg.contains("trace") && unset("--trace"))
        spec.trace_path = cfg["trace"].get<std::string>();
    if (cfg.contains("seed") && unset("--seed")) spec.seed = cfg["seed"].get<std::uint64_t>();
    if (cfg.contains("clients") && unset("--clients"))
        spec.clients = cfg["clients"].get<int>();
    if (cfg.contains("policy") && unset("--policy"))
        spec.policy = cfg["policy"].get<std::string>();
    if (cfg.contains("generator")) {
        const json& g = cfg["generator"];
        expect_keys(g, {"count", "input_mean", "input_std", "output_mean", "output_std",
                        "output_cap"},
                    "generator");
        if (g.contains("count") && unset("--count")) spec.count = g["count"].get<int>();
        if (g.contains("input_mean") && unset("--input-mean"))
            spec.params.input_mean = g["input_mean"].get<double>();
        if (g.contains("input_std") && unset("--input-std"))
            spec.params.input_std = g["input_std"].get<double>();
        if (g.contains("output_mean") && unset("--output-mean"))
            spec.params.output_mean = g["output_mean"].get<double>();
        if (g.contains("output_std") && unset("--output-std"))
            spec.params.output_std = g["output_std"].get<double>();
        if (g.contains("output_cap") && unset("--output-cap"))
            spec.params.output_cap = g["output_cap"].get<int>();
    }
    if (cfg.contains("cost")) {
        const json& c = cfg["cost"];
        expect_keys(c, {"prefill_rate_ms", "prefill_overhead_ms", "decode_rate_ms",
                        "decode_overhead_ms", "chunk_tokens", "max_levels"},
                    "cost");
        if (c.contains("prefill_rate_ms") && unset("--prefill-rate"))
            spec.cost.prefill_rate_ms = c["prefill_rate_ms"].get<double>();
        if (c.contains("prefill_overhead_ms") && unset("--prefill-overhead"))
            spec.cost.prefill_overhead_ms = c["prefill_overhead_ms"].get<double>();
        if (c.contains("decode_rate_ms") && unset("--decode-rate"))
            spec.cost.decode_rate_ms = c["decode_rate_ms"].get<double>();
        if (c.contains("decode_overhead_ms") && unset("--decode-overhead"))
            spec.cost.decode_overhead_ms = c["decode_overhead_ms"].get<double>();
        if (c.contains("chunk_tokens") && unset("--chunk"))
            spec.cost.chunk_tokens = c["chunk_tokens"].get<int>();
        if (c.contains("max_levels") && unset("--levels"))
            spec.cost.max_levels = c["max_levels"].get<int>();
    }
    if (cfg.contains("outputs")) {
        const json& o = cfg["outputs"];
        expect_keys(o, {"gantt_svg", "gantt_csv", "metrics_json"}, "outputs");
        if (o.contains("gantt_svg") && unset("--gantt"))
            spec.gantt_svg = o["gantt_svg"].get<std::string>();
        if (o.contains("gantt_csv") && unset("--gantt-csv"))
            spec.gantt_csv = o["gantt_csv"].get<std::string>();
        if (o.contains("metrics_json") && unset("--metrics"))
            spec.metrics_path = o["metrics_json"].get<std::string>();
    }
}

int cmd_run(const RunSpec& spec) {
    const Trace trace = trace_from(spec.trace_path, spec.count, spec.seed, spec.params);
    const CostModel cm(spec.cost);
    SimOptions opts;
    opts.policy = policy_from_string(spec.policy);
    if (opts.policy == Policy::Offline || opts.policy == Policy::Hybrid) {
        if (trace.size() <= ExactOptions{}.instance_cap) {
            opts.assignment = assign_exact(trace, spec.clients, cm, ServiceMode::Oracle);
            std::cerr << "assignment: exact"
                      << (opts.assignment->proven_optimal ? "" : " (budget hit, heuristic)")
                      << "\n";
        } else {
            opts.assignment = assign_lpt(trace, spec.clients, cm, ServiceMode::Oracle);
            std::cerr << "assignment: lpt (heuristic)\n";
        }
    }
    const SimResult res = run(trace, spec.clients, cm, opts);
    std::cout << "policy=" << spec.policy << " requests=" << trace.size()
              << " clients=" << spec.clients << " makespan_s=" << res.metrics.makespan_s
              << " utilization=" << res.metrics.utilization
              << " generation_speed=" << res.metrics.generation_speed << "\n";
    if (!spec.metrics_path.empty())
        write_file(spec.metrics_path, metrics_json(res.metrics).dump(2) + "\n");
    if (!spec.gantt_svg.empty())
        write_file(spec.gantt_svg, gantt_svg(res.schedule, spec.clients, cm));
    if (!spec.gantt_csv.empty()) write_file(spec.gantt_csv, gantt_csv(res.schedule, cm));
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"prefill/decode competition scheduling toolkit"};
    app.require_subcommand(1);

    // generate
    auto* gen = app.add_subcommand("generate", "write a synthetic trace file");
    int gen_count = 0;
    std::uint64_t gen_seed = 42;
    std::string gen_out = "trace.json";
    TraceParams gen_params;
    gen->add_option("--count", gen_count, "number of requests")->required();
    gen->add_option("--seed", gen_seed, "generator seed");
    gen->add_option("-o,--out", gen_out, "output trace file");
    std::string gen_preset;
    gen->add_option("--preset", gen_preset, "named parameter preset (the defaults)")
        ->check(CLI::IsMember({"gsm8k"}));
    add_param_flags(gen, gen_params);

    // run
    auto* runc = app.add_subcommand("run", "simulate one policy on a trace");
    RunSpec spec;
    std::string run_config, run_preset;
    runc->add_option("--config", run_config, "JSON run configuration file");
    runc->add_option("--preset", run_preset, "named parameter preset (the defaults)")
        ->check(CLI::IsMember({"gsm8k"}));
    runc->add_option("--trace", spec.trace_path, "input trace file (else generated)");
    runc->add_option("--count", spec.count, "generated trace size");
    runc->add_option("--seed", spec.seed, "generator seed");
    runc->add_option("--clients", spec.clients, "parallel client slots");
    runc->add_option("--policy", spec.policy, "baseline|offline|online|hybrid");
    runc->add_option("--metrics", spec.metrics_path, "metrics JSON output file");
    runc->add_option("--gantt", spec.gantt_svg, "gantt SVG output file");
    runc->add_option("--gantt-csv", spec.gantt_csv, "gantt CSV output file");
    add_cost_flags(runc, spec.cost);
    add_param_flags(runc, spec.params);

    // batch
    auto* batch = app.add_subcommand("batch", "seeded baseline-vs-hybrid comparison");
    int batch_cases = 100, batch_count = 1319, batch_clients = 200;
    std::uint64_t batch_seed = 1;
    std::string batch_out;
    std::string batch_preset;
    batch->add_option("--preset", batch_preset, "named parameter preset (the defaults)")
        ->check(CLI::IsMember({"gsm8k"}));
    batch->add_option("--cases", batch_cases, "number of cases");
    batch->add_option("--seed", batch_seed, "seed of the first case");
    batch->add_option("--count", batch_count, "requests per case");
    batch->add_option("--clients", batch_clients, "parallel client slots");
    batch->add_option("-o,--out", batch_out, "per-case CSV output file");
    CostModelConfig batch_cost;
    add_cost_flags(batch, batch_cost);
    TraceParams batch_params;
    add_param_flags(batch, batch_params);

    // lb
    auto* lb = app.add_subcommand("lb", "makespan lower bound for a trace");
    std::string lb_trace;
    int lb_clients = 200;
    bool lb_ceil = false;
    lb->add_option("--trace", lb_trace, "input trace file")->required();
    lb->add_option("--clients", lb_clients, "parallel client slots");
    lb->add_flag("--ceil-prefill", lb_ceil, "round the prefill stage count up");
    CostModelConfig lb_cost;
    add_cost_flags(lb, lb_cost);

    // export-mip
    auto* mip = app.add_subcommand("export-mip", "write the exact scheduling model (LP format)");
    std::string mip_trace, mip_out = "model.lp";
    int mip_clients = 0, mip_bins = 0;
    double mip_big_m = 1000;
    mip->add_option("--trace", mip_trace, "input trace file")->required();
    mip->add_option("--clients", mip_clients, "parallel client slots")->required();
    mip->add_option("--bins", mip_bins, "number of bins K")->required();
    mip->add_option("--big-m", mip_big_m, "big-M constant");
    mip->add_option("-o,--out", mip_out, "output model file");
    CostModelConfig mip_cost;
    add_cost_flags(mip, mip_cost);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (gen->parsed()) {
            if (gen_count < 1) throw std::invalid_argument("--count must be >= 1");
            const Trace t = generate_trace(gen_count, gen_seed, gen_params);
            save_trace_file(t, gen_out);
            std::cerr << "wrote " << gen_out << " (" << t.size() << " requests)\n";
            return 0;
        }
        if (runc->parsed()) {
            if (!run_config.empty()) apply_config_file(spec, run_config, *runc);
            return cmd_run(spec);
        }
        if (batch->parsed()) {
            BatchConfig cfg;
            cfg.request_count = batch_count;
            cfg.clients = batch_clients;
            cfg.params = batch_params;
            cfg.cost = batch_cost;
            const BatchSummary s = run_batch(batch_cases, batch_seed, cfg);
            const std::string csv = batch_to_csv(s);
            if (batch_out.empty())
                std::cout << csv;
            else
                write_file(batch_out, csv);
            std::cerr << "cases=" << s.cases.size()
                      << " mean_utilization_delta=" << s.mean_utilization_delta
                      << " mean_speed_delta=" << s.mean_speed_delta
                      << " hybrid_utilization_wins=" << s.hybrid_utilization_wins << "\n";
            return 0;
        }
        if (lb->parsed()) {
            const Trace t = load_trace_file(lb_trace);
            const CostModel cm(lb_cost);
            LowerBoundOptions opts;
            opts.ceil_prefill = lb_ceil;
            const LowerBound b = lower_bound(t, lb_clients, cm, opts);
            std::cout << json{{"prefill_s", ns_to_s(b.prefill_ns)},
                              {"decode_s", ns_to_s(b.decode_ns)},
                              {"total_s", ns_to_s(b.total_ns)},
                              {"heuristic_rounds", b.heuristic_rounds}}
                             .dump(2)
                      << "\n";
            return 0;
        }
        if (mip->parsed()) {
            const Trace t = load_trace_file(mip_trace);
            const CostModel cm(mip_cost);
            MipOptions opts;
            opts.bins = mip_bins;
            opts.big_m = mip_big_m;
            write_file(mip_out, export_original_mip(t, mip_clients, cm, opts));
            std::cerr << "wrote " << mip_out << "\n";
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}

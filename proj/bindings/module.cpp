#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "pdsched/gantt.hpp"
#include "pdsched/mip.hpp"
#include "pdsched/offline.hpp"
#include "pdsched/sim.hpp"
#include "pdsched/workload.hpp"

namespace py = pybind11;
using namespace pdsched;

namespace {

py::dict metrics_dict(const Metrics& m) {
    py::dict d;
    d["makespan_s"] = m.makespan_s;
    d["utilization"] = m.utilization;
    d["generation_speed"] = m.generation_speed;
    d["bubbles_ms"] = m.bubbles_ms;
    d["per_client_busy_ms"] = m.per_client_busy_ms;
    return d;
}

py::dict report_dict(const FeasibilityReport& rep) {
    py::dict d;
    d["feasible"] = rep.feasible;
    py::list fams;
    for (const auto& f : rep.families) {
        py::dict fd;
        fd["name"] = f.name;
        fd["ok"] = f.ok;
        fd["detail"] = f.detail;
        fams.append(fd);
    }
    d["families"] = fams;
    return d;
}

}  // namespace

PYBIND11_MODULE(_pdsched, m) {
    m.doc() = "prefill/decode competition scheduling core";

    py::class_<Request>(m, "Request")
        .def(py::init<>())
        .def_readwrite("id", &Request::id)
        .def_readwrite("input_tokens", &Request::input_tokens)
        .def_readwrite("output_tokens", &Request::output_tokens)
        .def_readwrite("est_output_tokens", &Request::est_output_tokens);

    py::class_<TraceParams>(m, "TraceParams")
        .def(py::init<>())
        .def_readwrite("input_mean", &TraceParams::input_mean)
        .def_readwrite("input_std", &TraceParams::input_std)
        .def_readwrite("output_mean", &TraceParams::output_mean)
        .def_readwrite("output_std", &TraceParams::output_std)
        .def_readwrite("output_cap", &TraceParams::output_cap);

    py::class_<Trace>(m, "Trace")
        .def(py::init<>())
        .def_readwrite("requests", &Trace::requests)
        .def_readwrite("seed", &Trace::seed)
        .def_readwrite("meta", &Trace::meta)
        .def("__len__", &Trace::size);

    py::class_<CostModelConfig>(m, "CostModelConfig")
        .def(py::init<>())
        .def_readwrite("prefill_rate_ms", &CostModelConfig::prefill_rate_ms)
        .def_readwrite("prefill_overhead_ms", &CostModelConfig::prefill_overhead_ms)
        .def_readwrite("decode_rate_ms", &CostModelConfig::decode_rate_ms)
        .def_readwrite("decode_overhead_ms", &CostModelConfig::decode_overhead_ms)
        .def_readwrite("chunk_tokens", &CostModelConfig::chunk_tokens)
        .def_readwrite("max_levels", &CostModelConfig::max_levels);

    py::class_<CostModel>(m, "CostModel")
        .def(py::init<>())
        .def(py::init<const CostModelConfig&>())
        .def("prefill_stage_time_ms", &CostModel::prefill_stage_time_ms)
        .def("decode_round_time_ms", &CostModel::decode_round_time_ms)
        .def("decode_phase_time_ms", &CostModel::decode_phase_time_ms);

    py::class_<Assignment>(m, "Assignment")
        .def_readonly("client_of", &Assignment::client_of)
        .def_readonly("proven_optimal", &Assignment::proven_optimal)
        .def_property_readonly("makespan_est_ms", [](const Assignment& a) {
            return ns_to_ms(a.makespan_est_ns);
        });

    m.def("generate_trace", &generate_trace, py::arg("count"), py::arg("seed"),
          py::arg("params") = TraceParams{});
    m.def("save_trace", [](const Trace& t, const std::string& path) {
        save_trace_file(t, path);
    });
    m.def("load_trace", &load_trace_file);
    m.def("trace_stats", [](const Trace& t) {
        const TraceStats s = trace_stats(t);
        py::dict d;
        d["count"] = s.count;
        d["input_mean"] = s.input_mean;
        d["input_std"] = s.input_std;
        d["output_mean"] = s.output_mean;
        d["output_std"] = s.output_std;
        return d;
    });

    m.def(
        "assign_lpt",
        [](const Trace& t, int clients, const CostModelConfig& cfg) {
            return assign_lpt(t, clients, CostModel(cfg), ServiceMode::Oracle);
        },
        py::arg("trace"), py::arg("clients"), py::arg("cost") = CostModelConfig{});
    m.def(
        "lower_bound",
        [](const Trace& t, int clients, const CostModelConfig& cfg) {
            const LowerBound b = lower_bound(t, clients, CostModel(cfg));
            py::dict d;
            d["prefill_s"] = ns_to_s(b.prefill_ns);
            d["decode_s"] = ns_to_s(b.decode_ns);
            d["total_s"] = ns_to_s(b.total_ns);
            d["heuristic_rounds"] = b.heuristic_rounds;
            return d;
        },
        py::arg("trace"), py::arg("clients"), py::arg("cost") = CostModelConfig{});

    m.def(
        "simulate",
        [](const Trace& t, int clients, const std::string& policy,
           const CostModelConfig& cfg) {
            const CostModel cm(cfg);
            SimOptions opts;
            opts.policy = policy_from_string(policy);
            if (opts.policy == Policy::Offline || opts.policy == Policy::Hybrid)
                opts.assignment = assign_lpt(t, clients, cm, ServiceMode::Oracle);
            const SimResult res = run(t, clients, cm, opts);
            py::dict d;
            d["metrics"] = metrics_dict(res.metrics);
            d["bins"] = static_cast<int>(res.schedule.bins.size());
            d["makespan_s"] = ns_to_s(res.schedule.makespan_ns);
            d["feasibility"] = report_dict(validate_schedule(res.schedule, t, clients, cm));
            d["gantt_svg"] = gantt_svg(res.schedule, clients, cm);
            d["gantt_csv"] = gantt_csv(res.schedule, cm);
            return d;
        },
        py::arg("trace"), py::arg("clients"), py::arg("policy") = "baseline",
        py::arg("cost") = CostModelConfig{});

    m.def(
        "export_mip",
        [](const Trace& t, int clients, int bins, const CostModelConfig& cfg) {
            MipOptions opts;
            opts.bins = bins;
            return export_original_mip(t, clients, CostModel(cfg), opts);
        },
        py::arg("trace"), py::arg("clients"), py::arg("bins"),
        py::arg("cost") = CostModelConfig{});

    m.def(
        "run_batch",
        [](int cases, std::uint64_t seed, int count, int clients) {
            BatchConfig cfg;
            cfg.request_count = count;
            cfg.clients = clients;
            const BatchSummary s = run_batch(cases, seed, cfg);
            py::dict d;
            d["mean_utilization_delta"] = s.mean_utilization_delta;
            d["mean_speed_delta"] = s.mean_speed_delta;
            d["hybrid_utilization_wins"] = s.hybrid_utilization_wins;
            d["csv"] = batch_to_csv(s);
            return d;
        },
        py::arg("cases"), py::arg("seed") = 1, py::arg("count") = 1319,
        py::arg("clients") = 200);
}

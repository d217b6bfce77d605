#pragma once

#include <optional>
#include <string>
#include <vector>

#include "pdsched/cost_model.hpp"
#include "pdsched/feasibility.hpp"
#include "pdsched/offline.hpp"
#include "pdsched/online.hpp"
#include "pdsched/schedule.hpp"
#include "pdsched/workload.hpp"

namespace pdsched {

struct SimEvent {
    nanos t = 0;
    std::string what;
};

struct SimOptions {
    Policy policy = Policy::Baseline;
    OnlineConfig online;
    std::optional<Assignment> assignment;  // required for offline/hybrid
    bool log_events = false;
};

struct SimResult {
    Schedule schedule;
    Metrics metrics;
    std::vector<SimEvent> events;
};

/// Deterministic event loop for the single-node serving system: at each
/// bin boundary either a batched prefill stage runs or one decode round
/// advances (every in-flight request emits one token), with requests
/// entering at their serving client as it frees up.
SimResult run(const Trace& trace, int clients, const CostModel& cm,
              const SimOptions& opts);

/// Checks a schedule against the scheduling model's constraint
/// families; returns per-family pass/fail with the first counterexample.
FeasibilityReport validate_schedule(const Schedule& schedule, const Trace& trace,
                                    int clients, const CostModel& cm);

Metrics compute_metrics(const Schedule& schedule, const Trace& trace, int clients,
                        const CostModel& cm);

/// Cumulative end offsets of the decode rounds of one stage (index r =
/// time from stage start to the end of round r). Within a bin the batch
/// only shrinks, so round r serves every client with >= r tokens.
std::vector<nanos> decode_round_offsets(const Bin::DecodeStage& stage,
                                        const CostModel& cm);

struct BatchCase {
    int case_index = 0;
    std::uint64_t seed = 0;
    double baseline_utilization = 0, hybrid_utilization = 0;
    double baseline_speed = 0, hybrid_speed = 0;
    double baseline_makespan_s = 0, hybrid_makespan_s = 0;
};

struct BatchSummary {
    std::vector<BatchCase> cases;
    double mean_utilization_delta = 0;  // hybrid - baseline
    double mean_speed_delta = 0;
    int hybrid_utilization_wins = 0;
};

struct BatchConfig {
    int request_count = 1319;
    int clients = 200;
    TraceParams params;
    CostModelConfig cost;
};

/// Seeded baseline-vs-hybrid comparison over `case_count` generated
/// traces (seeds seed, seed+1, ...).
BatchSummary run_batch(int case_count, std::uint64_t seed, const BatchConfig& cfg);

std::string batch_to_csv(const BatchSummary& summary);

}  // namespace pdsched

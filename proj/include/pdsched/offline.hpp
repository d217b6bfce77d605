#pragma once

#include <cstdint>
#include <vector>

#include "pdsched/cost_model.hpp"
#include "pdsched/workload.hpp"

namespace pdsched {

enum class ServiceMode { Oracle, Estimate };

/// Per-request decode service time: output tokens x decode rate.
/// Oracle mode reads the true output length, estimate mode the shared
/// estimate. Used for load balancing; the absolute scale cancels out.
nanos service_time_ns(const Request& r, const CostModel& cm, ServiceMode mode);

/// Request-to-client map plus per-client load totals.
struct Assignment {
    std::vector<int> client_of;   // request id -> client index
    std::vector<nanos> loads_ns;  // per-client sum of service times
    nanos makespan_est_ns = 0;    // max load
    bool proven_optimal = false;

    int clients() const { return static_cast<int>(loads_ns.size()); }
};

/// Longest-Processing-Time-first: requests in descending service time,
/// each on the currently least loaded client. Ties break to the lower
/// client index, then the lower request id.
Assignment assign_lpt(const Trace& trace, int clients, const CostModel& cm,
                      ServiceMode mode);

struct ExactOptions {
    std::int64_t node_budget = 10'000'000;
    int instance_cap = 24;  // hard size cap; raise explicitly for bigger runs
};

/// Branch-and-bound min-makespan assignment. Returns a proven optimum,
/// or the best incumbent with proven_optimal=false when the node
/// budget runs out.
Assignment assign_exact(const Trace& trace, int clients, const CostModel& cm,
                        ServiceMode mode, const ExactOptions& opts = {});

struct LowerBound {
    nanos prefill_ns = 0;
    nanos decode_ns = 0;
    nanos total_ns = 0;
    bool heuristic_rounds = false;  // round count from the classical bound, not the exact solver
};

struct LowerBoundOptions {
    ServiceMode mode = ServiceMode::Oracle;
    bool ceil_prefill = false;  // strict-mode variant; default keeps the floor
};

/// Makespan lower bound: prefill part from the largest-level
/// throughput, decode part from total decode work plus the per-round
/// overhead times the minimum achievable round count.
LowerBound lower_bound(const Trace& trace, int clients, const CostModel& cm,
                       const LowerBoundOptions& opts = {});

}  // namespace pdsched

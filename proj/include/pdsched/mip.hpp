#pragma once

#include <map>
#include <string>

#include "pdsched/cost_model.hpp"
#include "pdsched/feasibility.hpp"
#include "pdsched/schedule.hpp"
#include "pdsched/workload.hpp"

namespace pdsched {

struct MipOptions {
    int bins = 0;          // K; must be >= 1
    double big_m = 1000;   // M in the ordering constraints
    int instance_cap = 100;
};

/// Writes the full scheduling model (makespan objective, stage
/// ordering, level choice, decode lengths, assignment coupling and
/// variable domains) in LP interchange format. Row names embed the
/// constraint family (eq02..eq18) and the index tuple. Times are in
/// milliseconds; the per-stage prefill overhead is folded into the
/// level durations and the per-round decode overhead is omitted, as the
/// stage-level model has no overhead terms.
std::string export_original_mip(const Trace& trace, int clients, const CostModel& cm,
                                const MipOptions& opts);

/// A complete valuation of the model's variables, keyed by the names
/// used in the exported LP file.
using Valuation = std::map<std::string, double>;

/// Checks a valuation against every constraint family (tolerance 1e-6,
/// relative for large magnitudes) and reports the first violation per
/// family. Throws when referenced variables are missing.
FeasibilityReport validate_solution(const Valuation& values, const Trace& trace,
                                    int clients, const CostModel& cm,
                                    const MipOptions& opts);

/// Converts a simulated schedule into a model valuation (decode
/// fractions w from per-bin decoded token counts, d spanning each
/// request's consecutive decode bins, one y per level of the table).
Valuation schedule_to_solution(const Schedule& schedule, const Trace& trace,
                               int clients, const CostModel& cm);

}  // namespace pdsched

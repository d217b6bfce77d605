#pragma once

#include <string>

#include "pdsched/cost_model.hpp"
#include "pdsched/schedule.hpp"

namespace pdsched {

/// One row per (client, stage kind, start ms, end ms, request id).
std::string gantt_csv(const Schedule& schedule, const CostModel& cm);

/// Per-client horizontal bars, prefill and decode color-coded, idle
/// gaps left blank.
std::string gantt_svg(const Schedule& schedule, int clients, const CostModel& cm);

}  // namespace pdsched

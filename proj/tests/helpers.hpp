#pragma once

#include <utility>
#include <vector>

#include "pdsched/workload.hpp"

namespace pdsched::testing {

// Hand-built trace from (input, output) pairs; estimates equal truth
// unless given separately.
inline Trace make_trace(const std::vector<std::pair<int, int>>& io, int est = -1) {
    Trace t;
    for (int i = 0; i < static_cast<int>(io.size()); ++i) {
        Request r;
        r.id = i;
        r.input_tokens = io[i].first;
        r.output_tokens = io[i].second;
        r.est_output_tokens = est >= 0 ? est : io[i].second;
        t.requests.push_back(r);
    }
    return t;
}

}  // namespace pdsched::testing

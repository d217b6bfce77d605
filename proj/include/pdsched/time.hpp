#pragma once

#include <cmath>
#include <cstdint>

namespace pdsched {

// Simulated time is kept in integer nanoseconds so that runs are
// deterministic and stage arithmetic is exact. The calibrated rates
// (0.13 / 0.21 ms per token, 25 / 29 ms overheads) are all exact
// multiples of 1 ns.
using nanos = std::int64_t;

inline nanos ms_to_ns(double ms) {
    return static_cast<nanos>(std::llround(ms * 1e6));
}

inline double ns_to_ms(nanos t) {
    return static_cast<double>(t) / 1e6;
}

inline double ns_to_s(nanos t) {
    return static_cast<double>(t) / 1e9;
}

}  // namespace pdsched

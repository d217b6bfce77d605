#pragma once

#include <map>
#include <utility>
#include <vector>

#include "pdsched/time.hpp"

namespace pdsched {

/// One bin: a prefill stage followed by the decode rounds that run
/// until the next prefill stage opens.
struct Bin {
    struct PrefillStage {
        nanos start_ns = 0;
        nanos length_ns = 0;
        int level = 0;
        int total_tokens = 0;
        std::vector<std::pair<int, int>> members;  // (request id, client)
    };
    struct DecodeSlot {
        int request = -1;
        int tokens = 0;  // tokens this client decoded in this bin
    };
    struct DecodeStage {
        nanos start_ns = 0;
        nanos length_ns = 0;
        int rounds = 0;
        std::map<int, DecodeSlot> per_client;
    };

    int index = 0;
    PrefillStage prefill;
    DecodeStage decode;
};

struct Schedule {
    std::vector<Bin> bins;
    nanos makespan_ns = 0;
};

struct Metrics {
    double makespan_s = 0;
    double utilization = 0;        // sum of busy time / (clients x makespan)
    double generation_speed = 0;   // output tokens per second
    std::map<int, double> per_client_busy_ms;
    double bubbles_ms = 0;         // total idle client-time
};

}  // namespace pdsched

#include <algorithm>
#include <random>

#include "doctest.h"
#include "helpers.hpp"
#include "pdsched/offline.hpp"

using namespace pdsched;
using pdsched::testing::make_trace;

namespace {

// Cost model where decode service time is output_tokens milliseconds.
CostModel unit_decode() {
    CostModelConfig cfg;
    cfg.decode_rate_ms = 1.0;
    return CostModel(cfg);
}

// Minimum makespan over all clients^n assignments, by enumeration.
nanos brute_force(const std::vector<nanos>& items, int clients) {
    const int n = static_cast<int>(items.size());
    std::vector<int> pick(n, 0);
    nanos best = -1;
    while (true) {
        std::vector<nanos> load(clients, 0);
        for (int i = 0; i < n; ++i) load[pick[i]] += items[i];
        const nanos mk = *std::max_element(load.begin(), load.end());
        if (best < 0 || mk < best) best = mk;
        int i = 0;
        while (i < n && ++pick[i] == clients) pick[i++] = 0;
        if (i == n) break;
    }
    return best;
}

}  // namespace

TEST_CASE("LPT lands on 9 where the optimum is 8") {
    // Classic instance T = [5,4,3,2,2] on two machines.
    const Trace t = make_trace({{1, 5}, {1, 4}, {1, 3}, {1, 2}, {1, 2}});
    const CostModel cm = unit_decode();
    const Assignment lpt = assign_lpt(t, 2, cm, ServiceMode::Oracle);
    CHECK(lpt.makespan_est_ns == ms_to_ns(9.0));
    const Assignment exact = assign_exact(t, 2, cm, ServiceMode::Oracle);
    CHECK(exact.makespan_est_ns == ms_to_ns(8.0));
    CHECK(exact.proven_optimal);
}

TEST_CASE("service time honors the estimate/oracle split") {
    const Trace t = make_trace({{10, 100}}, 7);
    const CostModel cm = unit_decode();
    CHECK(service_time_ns(t.requests[0], cm, ServiceMode::Oracle) == ms_to_ns(100.0));
    CHECK(service_time_ns(t.requests[0], cm, ServiceMode::Estimate) == ms_to_ns(7.0));
}

TEST_CASE("LPT ties break to the lower client then the lower id") {
    const Trace t = make_trace({{1, 4}, {1, 4}, {1, 4}, {1, 4}});
    const Assignment a = assign_lpt(t, 2, unit_decode(), ServiceMode::Oracle);
    CHECK(a.client_of == std::vector<int>{0, 1, 0, 1});
    CHECK(a.loads_ns[0] == a.loads_ns[1]);
}

TEST_CASE("exact assignment matches brute force on random small instances") {
    std::mt19937_64 rng(123);
    const CostModel cm = unit_decode();
    for (int trial = 0; trial < 60; ++trial) {
        const int n = 1 + int(rng() % 10);
        const int clients = 1 + int(rng() % 4);
        std::vector<std::pair<int, int>> io;
        std::vector<nanos> items;
        for (int i = 0; i < n; ++i) {
            const int out = 1 + int(rng() % 40);
            io.push_back({1, out});
            items.push_back(ms_to_ns(double(out)));
        }
        const Trace t = make_trace(io);
        const Assignment a = assign_exact(t, clients, cm, ServiceMode::Oracle);
        CHECK(a.makespan_est_ns == brute_force(items, clients));
        CHECK(a.proven_optimal);
        // The reported loads must agree with the reported mapping.
        std::vector<nanos> load(clients, 0);
        for (int i = 0; i < n; ++i) load[a.client_of[i]] += items[i];
        CHECK(load == a.loads_ns);
    }
}

TEST_CASE("LPT stays within the Graham bound of the optimum") {
    std::mt19937_64 rng(321);
    const CostModel cm = unit_decode();
    for (int trial = 0; trial < 40; ++trial) {
        const int n = 2 + int(rng() % 9);
        const int clients = 2 + int(rng() % 3);
        std::vector<std::pair<int, int>> io;
        for (int i = 0; i < n; ++i) io.push_back({1, 1 + int(rng() % 50)});
        const Trace t = make_trace(io);
        const double lpt = double(assign_lpt(t, clients, cm, ServiceMode::Oracle).makespan_est_ns);
        const double opt = double(assign_exact(t, clients, cm, ServiceMode::Oracle).makespan_est_ns);
        CHECK(lpt >= opt);
        CHECK(lpt <= (4.0 / 3.0 - 1.0 / (3.0 * clients)) * opt + 1);
    }
}

TEST_CASE("exact assignment refuses oversized instances") {
    const Trace t = generate_trace(30, 1, {});
    CHECK_THROWS_WITH_AS(assign_exact(t, 4, unit_decode(), ServiceMode::Oracle),
                         doctest::Contains("too large"), std::invalid_argument);
}

TEST_CASE("lower bound on a hand-checkable instance") {
    CostModelConfig cfg;
    cfg.decode_rate_ms = 1.0;
    cfg.decode_overhead_ms = 2.0;
    const CostModel cm(cfg);
    // Two requests, outputs 5 and 3, two clients. Prefill work (20
    // tokens) is below one full top-level stage, so the prefill part
    // floors to zero; decode needs (5+3) x 1ms of token work and at
    // least max(5,3) = 5 rounds of 2ms overhead.
    const Trace t = make_trace({{10, 5}, {10, 3}});
    const LowerBound lb = lower_bound(t, 2, cm);
    CHECK(lb.prefill_ns == 0);
    CHECK(lb.decode_ns == ms_to_ns(8.0 + 10.0));
    CHECK(lb.total_ns == lb.prefill_ns + lb.decode_ns);
    CHECK_FALSE(lb.heuristic_rounds);
}

TEST_CASE("lower bound prefill part counts full top-level stages") {
    CostModelConfig cfg;
    const CostModel cm(cfg);
    // 3 x 8192 input tokens = exactly 3 full stages of the largest level.
    const Trace t = make_trace({{8192, 1}, {8192, 1}, {8192, 1}});
    const LowerBound lb = lower_bound(t, 3, cm);
    CHECK(lb.prefill_ns == 3 * cm.prefill_stage_time(8192).duration_ns);

    LowerBoundOptions strict;
    strict.ceil_prefill = true;
    const Trace t2 = make_trace({{8192, 1}, {100, 1}});
    CHECK(lower_bound(t2, 2, cm, strict).prefill_ns ==
          2 * cm.prefill_stage_time(8192).duration_ns);
    CHECK(lower_bound(t2, 2, cm).prefill_ns == cm.prefill_stage_time(8192).duration_ns);
}

TEST_CASE("gsm8k-scale lower bound falls in the published band") {
    const Trace t = generate_trace(1319, 7, {});
    const LowerBound lb = lower_bound(t, 200, CostModel{});
    CHECK(ns_to_s(lb.total_ns) > 153.0);
    CHECK(ns_to_s(lb.total_ns) < 207.0);
}

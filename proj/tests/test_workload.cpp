#include <cmath>
#include <sstream>

#include "doctest.h"
#include "pdsched/workload.hpp"

using namespace pdsched;

TEST_CASE("seed 42 golden trace") {
    const Trace t = generate_trace(5, 42, {});
    REQUIRE(t.size() == 5);
    const int want[5][2] = {{41, 512}, {113, 173}, {53, 315}, {44, 512}, {29, 398}};
    for (int i = 0; i < 5; ++i) {
        CHECK(t.requests[i].id == i);
        CHECK(t.requests[i].input_tokens == want[i][0]);
        CHECK(t.requests[i].output_tokens == want[i][1]);
        CHECK(t.requests[i].est_output_tokens == 345);  // round(344.83)
    }
    CHECK(t.seed == 42);
}

TEST_CASE("generation is deterministic in the seed") {
    const Trace a = generate_trace(50, 7, {});
    const Trace b = generate_trace(50, 7, {});
    const Trace c = generate_trace(50, 8, {});
    CHECK(save_trace(a) == save_trace(b));
    CHECK(save_trace(a) != save_trace(c));
}

TEST_CASE("token counts respect the floor and the cap") {
    TraceParams p;
    p.input_mean = 2.0;
    p.input_std = 30.0;  // heavy mass below zero before truncation
    const Trace t = generate_trace(2000, 5, p);
    bool cap_hit = false;
    for (const auto& r : t.requests) {
        CHECK(r.input_tokens >= 1);
        CHECK(r.output_tokens >= 1);
        CHECK(r.output_tokens <= 512);
        cap_hit = cap_hit || r.output_tokens == 512;
    }
    // P(N(344.83, 187.99) > 512) ~ 0.19: the cap binds in 2000 draws.
    CHECK(cap_hit);
}

TEST_CASE("sample moments converge to the generator parameters") {
    // Means far enough from the truncation floor that its bias is far
    // below the 3-sigma sampling tolerance.
    TraceParams p;
    p.output_mean = 500.0;
    p.output_std = 50.0;
    p.output_cap = 0;
    const int n = 100000;
    const Trace t = generate_trace(n, 11, p);
    const TraceStats s = trace_stats(t);
    const double tol_in = 3.0 * p.input_std / std::sqrt(double(n)) + 0.5;  // + rounding
    const double tol_out = 3.0 * p.output_std / std::sqrt(double(n)) + 0.5;
    CHECK(std::fabs(s.input_mean - p.input_mean) < tol_in);
    CHECK(std::fabs(s.output_mean - p.output_mean) < tol_out);
    CHECK(std::fabs(s.input_std - p.input_std) < 1.0);
    CHECK(std::fabs(s.output_std - p.output_std) < 1.5);
}

TEST_CASE("save and load round-trip exactly") {
    const Trace t = generate_trace(20, 99, {});
    std::istringstream in(save_trace(t));
    const Trace back = load_trace(in);
    REQUIRE(back.size() == t.size());
    CHECK(back.seed == t.seed);
    CHECK(back.meta.output_cap == t.meta.output_cap);
    for (int i = 0; i < t.size(); ++i) {
        CHECK(back.requests[i].id == t.requests[i].id);
        CHECK(back.requests[i].input_tokens == t.requests[i].input_tokens);
        CHECK(back.requests[i].output_tokens == t.requests[i].output_tokens);
        CHECK(back.requests[i].est_output_tokens == t.requests[i].est_output_tokens);
    }
}

TEST_CASE("check_trace rejects malformed traces") {
    CHECK_THROWS_AS(check_trace(Trace{}), std::invalid_argument);
    CHECK_THROWS_AS(generate_trace(0, 1, {}), std::invalid_argument);

    Trace t = generate_trace(3, 1, {});
    t.requests[1].id = 0;
    CHECK_THROWS_WITH_AS(check_trace(t), doctest::Contains("duplicate"),
                         std::invalid_argument);

    Trace gap = generate_trace(3, 1, {});
    gap.requests[2].id = 5;
    CHECK_THROWS_AS(check_trace(gap), std::invalid_argument);

    Trace zero = generate_trace(3, 1, {});
    zero.requests[0].output_tokens = 0;
    CHECK_THROWS_AS(check_trace(zero), std::invalid_argument);
}

TEST_CASE("malformed trace files are rejected with context") {
    std::istringstream bad("{\"seed\": 1}");
    CHECK_THROWS_WITH_AS(load_trace(bad), doctest::Contains("malformed"),
                         std::invalid_argument);
    std::istringstream notjson("not json at all");
    CHECK_THROWS_AS(load_trace(notjson), std::invalid_argument);
}

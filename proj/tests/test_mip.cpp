#include <sstream>

#include "doctest.h"
#include "helpers.hpp"
#include "pdsched/mip.hpp"
#include "pdsched/sim.hpp"

using namespace pdsched;
using pdsched::testing::make_trace;

namespace {

int count_rows(const std::string& lp, const std::string& prefix) {
    int n = 0;
    std::istringstream in(lp);
    std::string line;
    while (std::getline(in, line))
        if (line.rfind(" " + prefix, 0) == 0) ++n;
    return n;
}

MipOptions opts_with(int bins) {
    MipOptions o;
    o.bins = bins;
    return o;
}

}  // namespace

TEST_CASE("exported model has one row per index tuple") {
    const Trace t = make_trace({{79, 202}, {48, 73}});
    const CostModel cm;
    const int I = 2, J = 2, K = 3, L = 16;
    const std::string lp = export_original_mip(t, J, cm, opts_with(K));

    CHECK(count_rows(lp, "eq02_") == K);
    CHECK(count_rows(lp, "eq03_") == K - 1);
    CHECK(count_rows(lp, "eq04_") == K);
    CHECK(count_rows(lp, "eq05_") == K);
    CHECK(count_rows(lp, "eq06_") == K);
    CHECK(count_rows(lp, "eq07_") == K);
    CHECK(count_rows(lp, "eq08_") == J * K);
    CHECK(count_rows(lp, "eq09_") == I * J * K);
    CHECK(count_rows(lp, "eq10_") == I * J * K * (K - 1) / 2);
    CHECK(count_rows(lp, "eq11_") == I * J * K * (K - 1) / 2);
    CHECK(count_rows(lp, "eq12_") == J * K);
    CHECK(count_rows(lp, "eq13_") == I * J);
    CHECK(count_rows(lp, "eq14_") == I * J);
    CHECK(count_rows(lp, "eq15_") == I);
    CHECK(count_rows(lp, "eq16_") == J * K);
    CHECK(count_rows(lp, "eq17_") == I * J);
    CHECK(count_rows(lp, "eq18_") == I);

    // LP sections in order, level durations folded into eq05.
    CHECK(lp.find("Minimize") < lp.find("Subject To"));
    CHECK(lp.find("Subject To") < lp.find("Bounds"));
    CHECK(lp.find("Bounds") < lp.find("Binaries"));
    CHECK(lp.find("Binaries") < lp.find("End"));
    CHECK(lp.find("y_k1_l" + std::to_string(L)) != std::string::npos);
    // No "+ -" artifacts: every coefficient is signed exactly once.
    CHECK(lp.find("+ -") == std::string::npos);
}

TEST_CASE("export rejects bad instances") {
    const CostModel cm;
    const Trace big = generate_trace(101, 1, {});
    CHECK_THROWS_WITH_AS(export_original_mip(big, 2, cm, opts_with(2)),
                         doctest::Contains("too large"), std::invalid_argument);
    const Trace small = make_trace({{10, 10}});
    CHECK_THROWS_AS(export_original_mip(small, 1, cm, opts_with(0)),
                    std::invalid_argument);
    CHECK_THROWS_AS(export_original_mip(small, 0, cm, opts_with(1)),
                    std::invalid_argument);
}

TEST_CASE("a simulated schedule converts into a feasible model solution") {
    const Trace t = make_trace({{79, 30}, {48, 12}});
    const CostModel cm;
    SimOptions so;
    so.policy = Policy::Baseline;
    const SimResult res = run(t, 1, cm, so);

    const Valuation v = schedule_to_solution(res.schedule, t, 1, cm);
    const FeasibilityReport rep =
        validate_solution(v, t, 1, cm, opts_with(int(res.schedule.bins.size())));
    INFO(rep.summary());
    CHECK(rep.feasible);
    CHECK(v.at("tmax") == doctest::Approx(ns_to_ms(res.schedule.makespan_ns)));
}

TEST_CASE("validate_solution spots violations and missing variables") {
    const Trace t = make_trace({{79, 30}, {48, 12}});
    const CostModel cm;
    SimOptions so;
    so.policy = Policy::Baseline;
    const SimResult res = run(t, 2, cm, so);
    const MipOptions opts = opts_with(int(res.schedule.bins.size()));

    Valuation good = schedule_to_solution(res.schedule, t, 2, cm);
    REQUIRE(validate_solution(good, t, 2, cm, opts).feasible);

    SUBCASE("moved request breaks the assignment coupling") {
        Valuation bad = good;
        bad["x_i1_j1"] = 0;
        bad["x_i1_j2"] = 1;
        const auto rep = validate_solution(bad, t, 2, cm, opts);
        CHECK_FALSE(rep.feasible);
    }
    SUBCASE("shortened makespan violates the objective bound") {
        Valuation bad = good;
        bad["tmax"] -= 1.0;
        const auto rep = validate_solution(bad, t, 2, cm, opts);
        CHECK_FALSE(rep.feasible);
        CHECK_FALSE(rep.families.front().ok);  // eq02 reported first
    }
    SUBCASE("missing variable throws") {
        Valuation bad = good;
        bad.erase("tmax");
        CHECK_THROWS_WITH_AS(validate_solution(bad, t, 2, cm, opts),
                             doctest::Contains("missing variable"),
                             std::invalid_argument);
    }
}

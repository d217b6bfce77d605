#include "doctest.h"
#include "pdsched/cost_model.hpp"

using namespace pdsched;

TEST_CASE("decode round at full occupancy matches the calibrated law") {
    CostModel cm;
    // 200 x 0.21 + 29 = 71 ms, exact in integer nanoseconds.
    CHECK(cm.decode_round_time_ns(200) == ms_to_ns(71.0));
    CHECK(cm.decode_round_time_ms(200) == doctest::Approx(71.0).epsilon(1e-9));
    CHECK_THROWS_AS(cm.decode_round_time_ns(0), std::invalid_argument);
    CHECK(cm.decode_round_time_ns(1) == ms_to_ns(29.21));
}

TEST_CASE("exact-fit level reproduces the 5000-token prefill stage") {
    CostModelConfig cfg;
    CostModel cm(cfg, LevelTable::exact_fit({5000}, cfg.prefill_rate_ms,
                                            cfg.prefill_overhead_ms));
    // 5000 x 0.13 + 25 = 675 ms.
    const auto stage = cm.prefill_stage_time(5000);
    CHECK(stage.duration_ns == ms_to_ns(675.0));
    CHECK(stage.level == 1);
}

TEST_CASE("chunked level table covers multiples of the chunk size") {
    CostModel cm;
    const auto& lv = cm.levels();
    REQUIRE(lv.entries.size() == 16);
    CHECK(lv.entries.front().capacity_tokens == 512);
    CHECK(lv.max_capacity() == 8192);
    for (const auto& e : lv.entries) {
        CHECK(e.capacity_tokens == e.level * 512);
        CHECK(e.duration_ns == ms_to_ns(e.capacity_tokens * 0.13 + 25.0));
    }
}

TEST_CASE("level_for picks the smallest covering level") {
    CostModel cm;
    CHECK(cm.levels().level_for(1).level == 1);
    CHECK(cm.levels().level_for(512).level == 1);
    CHECK(cm.levels().level_for(513).level == 2);
    CHECK(cm.levels().level_for(8192).level == 16);
    CHECK_THROWS_WITH_AS(cm.levels().level_for(8193),
                         doctest::Contains("over capacity"), std::invalid_argument);
}

TEST_CASE("affine prefill law and its quantized upper bound") {
    CostModel cm;
    CHECK(cm.prefill_batch_time_ns(100) == ms_to_ns(38.0));  // 100 x 0.13 + 25
    CHECK_THROWS_AS(cm.prefill_batch_time_ns(0), std::invalid_argument);
    for (int tokens : {1, 17, 512, 513, 2000, 8192}) {
        // A stage billed at its level never undercuts the affine law.
        CHECK(cm.prefill_stage_time(tokens).duration_ns >=
              cm.prefill_batch_time_ns(tokens));
    }
    // Exactly at a level boundary the two coincide.
    CHECK(cm.prefill_stage_time(1024).duration_ns == cm.prefill_batch_time_ns(1024));
}

TEST_CASE("decode phase is rounds x round time at constant occupancy") {
    CostModel cm;
    CHECK(cm.decode_phase_time_ns(10, 200) == 10 * cm.decode_round_time_ns(200));
    CHECK(cm.decode_phase_time_ms(1, 1) == doctest::Approx(29.21));
}

TEST_CASE("custom cost parameters flow through") {
    CostModelConfig cfg;
    cfg.prefill_rate_ms = 1.0;
    cfg.prefill_overhead_ms = 2.0;
    cfg.decode_rate_ms = 3.0;
    cfg.decode_overhead_ms = 4.0;
    cfg.chunk_tokens = 10;
    cfg.max_levels = 3;
    CostModel cm(cfg);
    CHECK(cm.levels().max_capacity() == 30);
    CHECK(cm.prefill_batch_time_ns(5) == ms_to_ns(7.0));
    CHECK(cm.decode_round_time_ns(2) == ms_to_ns(10.0));
}

#pragma once

#include <stdexcept>
#include <vector>

#include "pdsched/time.hpp"

namespace pdsched {

/// One row of the discrete prefill level table: a prefill stage at this
/// level may hold up to capacity_tokens input tokens and runs for
/// duration_ns.
struct LevelEntry {
    int level = 0;  // 1-based
    int capacity_tokens = 0;
    nanos duration_ns = 0;
};

struct LevelTable {
    std::vector<LevelEntry> entries;

    /// Levels at multiples of a chunk size: capacity l*chunk, duration
    /// capacity * rate + overhead.
    static LevelTable chunked(double rate_ms_per_token, double overhead_ms,
                              int chunk_tokens, int max_levels);

    /// Levels with explicit capacities (duration from the affine law).
    /// Used by tests that need a level whose capacity equals the batch
    /// token count exactly.
    static LevelTable exact_fit(const std::vector<int>& capacities,
                                double rate_ms_per_token, double overhead_ms);

    int max_capacity() const { return entries.back().capacity_tokens; }

    /// Smallest level whose capacity covers `tokens`.
    const LevelEntry& level_for(int tokens) const;
};

struct CostModelConfig {
    double prefill_rate_ms = 0.13;    // per input token
    double prefill_overhead_ms = 25.0;  // per prefill stage
    double decode_rate_ms = 0.21;     // per token per decode round
    double decode_overhead_ms = 29.0;   // per decode round
    int chunk_tokens = 512;
    int max_levels = 16;
};

/// Calibrated linear timing laws for prefill batches and decode rounds,
/// plus the prefill level table. Immutable after construction.
class CostModel {
  public:
    explicit CostModel(const CostModelConfig& cfg = {});
    CostModel(const CostModelConfig& cfg, LevelTable custom_levels);

    struct PrefillStage {
        nanos duration_ns = 0;
        int level = 0;
    };

    /// Level-quantized prefill duration: the smallest level covering
    /// `total_tokens` and that level's duration.
    PrefillStage prefill_stage_time(int total_tokens) const;

    /// Measured affine law on the actual batch size:
    /// tokens * rate + overhead. The simulator charges this for a
    /// prefill stage; levels bound only the batch capacity.
    nanos prefill_batch_time_ns(int total_tokens) const;

    /// One decode round: every active client emits one token.
    nanos decode_round_time_ns(int active_clients) const;

    /// `tokens` rounds at constant concurrency. Estimator only; the
    /// simulator recomputes round by round as the batch drains.
    nanos decode_phase_time_ns(int tokens, int clients) const;

    double prefill_stage_time_ms(int total_tokens) const {
        return ns_to_ms(prefill_stage_time(total_tokens).duration_ns);
    }
    double decode_round_time_ms(int active_clients) const {
        return ns_to_ms(decode_round_time_ns(active_clients));
    }
    double decode_phase_time_ms(int tokens, int clients) const {
        return ns_to_ms(decode_phase_time_ns(tokens, clients));
    }

    nanos prefill_rate_ns() const { return prefill_rate_ns_; }
    nanos prefill_overhead_ns() const { return prefill_overhead_ns_; }
    nanos decode_rate_ns() const { return decode_rate_ns_; }
    nanos decode_overhead_ns() const { return decode_overhead_ns_; }
    const LevelTable& levels() const { return levels_; }
    const CostModelConfig& config() const { return cfg_; }

  private:
    CostModelConfig cfg_;
    nanos prefill_rate_ns_;
    nanos prefill_overhead_ns_;
    nanos decode_rate_ns_;
    nanos decode_overhead_ns_;
    LevelTable levels_;
};

}  // namespace pdsched

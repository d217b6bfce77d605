#include "pdsched/cost_model.hpp"

#include <string>

namespace pdsched {

LevelTable LevelTable::chunked(double rate_ms_per_token, double overhead_ms,
                               int chunk_tokens, int max_levels) {
    if (chunk_tokens < 1) throw std::invalid_argument("chunk_tokens must be >= 1");
    if (max_levels < 1) throw std::invalid_argument("max_levels must be >= 1");
    LevelTable t;
    for (int l = 1; l <= max_levels; ++l) {
        const int cap = l * chunk_tokens;
        t.entries.push_back(
            {l, cap, ms_to_ns(cap * rate_ms_per_token + overhead_ms)});
    }
    return t;
}

LevelTable LevelTable::exact_fit(const std::vector<int>& capacities,
                                 double rate_ms_per_token, double overhead_ms) {
    if (capacities.empty()) throw std::invalid_argument("empty level table");
    LevelTable t;
    int l = 0;
    int prev = 0;
    for (int cap : capacities) {
        if (cap <= prev) throw std::invalid_argument("capacities must be strictly increasing");
        prev = cap;
        ++l;
        t.entries.push_back({l, cap, ms_to_ns(cap * rate_ms_per_token + overhead_ms)});
    }
    return t;
}

const LevelEntry& LevelTable::level_for(int tokens) const {
    if (tokens < 1) throw std::invalid_argument("prefill batch must hold at least 1 token");
    for (const auto& e : entries) {
        if (e.capacity_tokens >= tokens) return e;
    }
    throw std::invalid_argument("prefill batch over capacity: " + std::to_string(tokens) +
                                " tokens > max level capacity " +
                                std::to_string(max_capacity()));
}

CostModel::CostModel(const CostModelConfig& cfg)
    : CostModel(cfg, LevelTable::chunked(cfg.prefill_rate_ms, cfg.prefill_overhead_ms,
                                         cfg.chunk_tokens, cfg.max_levels)) {}

CostModel::CostModel(const CostModelConfig& cfg, LevelTable custom_levels)
    : cfg_(cfg),
      prefill_rate_ns_(ms_to_ns(cfg.prefill_rate_ms)),
      prefill_overhead_ns_(ms_to_ns(cfg.prefill_overhead_ms)),
      decode_rate_ns_(ms_to_ns(cfg.decode_rate_ms)),
      decode_overhead_ns_(ms_to_ns(cfg.decode_overhead_ms)),
      levels_(std::move(custom_levels)) {
    if (cfg.prefill_rate_ms <= 0) throw std::invalid_argument("prefill_rate must be > 0");
    if (cfg.decode_rate_ms <= 0) throw std::invalid_argument("decode_rate must be > 0");
    if (cfg.prefill_overhead_ms < 0 || cfg.decode_overhead_ms < 0)
        throw std::invalid_argument("overheads must be >= 0");
    if (levels_.entries.empty()) throw std::invalid_argument("empty level table");
}

CostModel::PrefillStage CostModel::prefill_stage_time(int total_tokens) const {
    const LevelEntry& e = levels_.level_for(total_tokens);
    return {e.duration_ns, e.level};
}

nanos CostModel::prefill_batch_time_ns(int total_tokens) const {
    levels_.level_for(total_tokens);  // capacity and positivity check
    return total_tokens * prefill_rate_ns_ + prefill_overhead_ns_;
}

nanos CostModel::decode_round_time_ns(int active_clients) const {
    if (active_clients < 1) throw std::invalid_argument("decode round needs at least 1 active client");
    return active_clients * decode_rate_ns_ + decode_overhead_ns_;
}

nanos CostModel::decode_phase_time_ns(int tokens, int clients) const {
    if (tokens < 1) throw std::invalid_argument("decode phase needs at least 1 token");
    return tokens * decode_round_time_ns(clients);
}

}  // namespace pdsched

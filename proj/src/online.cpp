#include "pdsched/online.hpp"

#include <algorithm>
#include <stdexcept>

namespace pdsched {

Policy policy_from_string(const std::string& name) {
    if (name == "baseline") return Policy::Baseline;
    if (name == "offline") return Policy::Offline;
    if (name == "online") return Policy::Online;
    if (name == "hybrid") return Policy::Hybrid;
    throw std::invalid_argument("unknown policy: " + name);
}

std::string to_string(Policy p) {
    switch (p) {
        case Policy::Baseline: return "baseline";
        case Policy::Offline: return "offline";
        case Policy::Online: return "online";
        case Policy::Hybrid: return "hybrid";
    }
    return "?";
}

OnlineState::OnlineState(const Trace& trace, int clients, const OnlineConfig& cfg,
                         const std::vector<int>& client_of)
    : trace_(trace), cfg_(cfg) {
    if (clients < 1) throw std::invalid_argument("clients must be >= 1");
    if (client_of.size() != trace.requests.size())
        throw std::invalid_argument("assignment does not cover the trace");

    queues_.resize(clients);
    remain_token_.assign(clients, 0);
    phase_.assign(clients, Phase::Idle);
    est_remaining_.assign(clients, 0);
    request_of_.assign(clients, -1);
    started_.assign(trace.requests.size(), 0);

    for (const auto& r : trace.requests) {
        const int j = client_of[r.id];
        if (j < 0 || j >= clients)
            throw std::invalid_argument("assignment references unknown client");
        queues_[j].push_back(r.id);
    }
    for (int j = 0; j < clients; ++j) {
        auto& q = queues_[j];
        if (cfg_.sorted_queues) {
            // Head (back of the vector) carries the largest expected
            // token count; ties go to the lower request id.
            std::sort(q.begin(), q.end(), [&](int a, int b) {
                const auto ta = queue_tokens(a), tb = queue_tokens(b);
                if (ta != tb) return ta < tb;
                return a > b;
            });
        } else {
            // FCFS: head is the lowest id.
            std::sort(q.begin(), q.end(), std::greater<int>());
        }
        for (int id : q) remain_token_[j] += queue_tokens(id);
        queued_count_ += static_cast<int>(q.size());
    }
}

std::int64_t OnlineState::queue_tokens(int request_id) const {
    const Request& r = trace_.requests[request_id];
    return r.input_tokens + r.est_output_tokens;
}

void OnlineState::admit(int request_id, int client) {
    if (request_id < 0 || request_id >= trace_.size())
        throw std::invalid_argument("unknown request id");
    if (started_[request_id] != 0)
        throw std::invalid_argument("duplicate admission of request " +
                                    std::to_string(request_id));
    if (phase_[client] != Phase::Idle)
        throw std::logic_error("admitting to a busy client");
    started_[request_id] = 1;
    phase_[client] = Phase::Waiting;
    request_of_[client] = request_id;
    waiting_.push_back({request_id, client});
}

std::optional<int> OnlineState::next_request(int client) {
    if (phase_[client] != Phase::Idle)
        throw std::logic_error("next_request called for a busy client");

    auto pop_from = [&](int j) {
        const int id = queues_[j].back();
        queues_[j].pop_back();
        remain_token_[j] -= queue_tokens(id);
        --queued_count_;
        return id;
    };

    if (!queues_[client].empty()) return pop_from(client);
    if (!cfg_.steal) return std::nullopt;

    int best = -1;
    for (int j = 0; j < static_cast<int>(queues_.size()); ++j) {
        if (remain_token_[j] > 0 && (best < 0 || remain_token_[j] > remain_token_[best]))
            best = j;
    }
    if (best < 0) return std::nullopt;
    return pop_from(best);
}

int OnlineState::prefill_batch_tokens(const CostModel& cm) const {
    const int cap = cm.levels().max_capacity();
    int total = 0;
    for (const auto& w : waiting_) {
        const int t = trace_.requests[w.request].input_tokens;
        if (t > cap) cm.levels().level_for(t);  // throws: over capacity
        if (total + t <= cap) total += t;
    }
    return total;
}

IterationDecision OnlineState::iteration_decision(const CostModel& cm) const {
    IterationDecision d;
    if (waiting_.empty() && active_count_ == 0)
        throw std::logic_error("iteration_decision with nothing waiting or decoding");
    if (waiting_.empty()) {
        d.kind = StageKind::Decode;
        return d;
    }
    d.prefill_cost_ns = cm.prefill_stage_time(prefill_batch_tokens(cm)).duration_ns;
    if (active_count_ == 0) {
        d.kind = StageKind::Prefill;
        return d;
    }

    std::int64_t waited_tokens = 0;
    if (cfg_.cd_all_active) {
        for (std::size_t j = 0; j < phase_.size(); ++j)
            if (phase_[j] == Phase::Decoding) waited_tokens += est_remaining_[j];
    } else {
        for (const auto& w : waiting_)
            waited_tokens += trace_.requests[w.request].est_output_tokens;
    }
    d.decode_cost_ns = waited_tokens * cm.decode_rate_ns();
    // Exact tie keeps decoding.
    d.kind = d.prefill_cost_ns < d.decode_cost_ns ? StageKind::Prefill : StageKind::Decode;
    return d;
}

std::vector<OnlineState::Waiting> OnlineState::take_prefill_batch(const CostModel& cm) {
    const int cap = cm.levels().max_capacity();
    std::vector<Waiting> batch;
    std::vector<Waiting> rest;
    int total = 0;
    for (const auto& w : waiting_) {
        const int t = trace_.requests[w.request].input_tokens;
        if (t > cap) cm.levels().level_for(t);  // throws: over capacity
        if (total + t <= cap) {
            total += t;
            batch.push_back(w);
        } else {
            rest.push_back(w);
        }
    }
    waiting_ = std::move(rest);
    for (const auto& w : batch) {
        phase_[w.client] = Phase::Decoding;
        est_remaining_[w.client] = trace_.requests[w.request].est_output_tokens;
        ++active_count_;
    }
    return batch;
}

void OnlineState::on_decode_token(int client) {
    if (phase_[client] != Phase::Decoding)
        throw std::logic_error("decode token for a client that is not decoding");
    if (est_remaining_[client] > 0) --est_remaining_[client];
}

void OnlineState::on_complete(int client) {
    if (phase_[client] != Phase::Decoding)
        throw std::logic_error("completion for a client that is not decoding");
    started_[request_of_[client]] = 2;
    phase_[client] = Phase::Idle;
    request_of_[client] = -1;
    est_remaining_[client] = 0;
    --active_count_;
}

bool OnlineState::done() const {
    return queued_count_ == 0 && waiting_.empty() && active_count_ == 0;
}

}  // namespace pdsched

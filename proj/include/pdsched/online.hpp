#pragma once

#include <optional>
#include <vector>

#include "pdsched/cost_model.hpp"
#include "pdsched/offline.hpp"
#include "pdsched/workload.hpp"

namespace pdsched {

enum class Policy { Baseline, Offline, Online, Hybrid };

Policy policy_from_string(const std::string& name);
std::string to_string(Policy p);

enum class StageKind { Prefill, Decode };

struct IterationDecision {
    StageKind kind = StageKind::Decode;
    nanos prefill_cost_ns = 0;  // C_p
    nanos decode_cost_ns = 0;   // C_d
};

struct OnlineConfig {
    bool steal = true;          // idle clients take work from loaded ones
    bool sorted_queues = true;  // descending by input + estimated output tokens
    // C_d counts the estimated remaining decode tokens of the requests
    // waiting behind the candidate prefill. The alternative sums over
    // all in-flight decodes instead.
    bool cd_all_active = false;
};

/// Mutable scheduling state for one run: per-client request queues,
/// expected remaining token counters, the waiting-prefill set and the
/// in-flight decode set. Single-owner; all mutations happen on the
/// simulation thread.
class OnlineState {
  public:
    struct Waiting {
        int request;
        int client;
    };

    OnlineState(const Trace& trace, int clients, const OnlineConfig& cfg,
                const std::vector<int>& client_of);

    /// Entry point for a request into the waiting-prefill set, bound to
    /// the client that will serve it. Throws on duplicate admission.
    void admit(int request_id, int client);

    /// Next request for an idle client: its own queue head, else (with
    /// stealing on) the head of the queue with the most expected
    /// remaining tokens. Returns nothing when no unstarted request is
    /// left anywhere.
    std::optional<int> next_request(int client);

    /// Prefill-vs-decode comparison at a bin boundary. PREFILL iff
    /// C_p < C_d and something is waiting; exact ties keep decoding.
    IterationDecision iteration_decision(const CostModel& cm) const;

    /// The waiting requests a prefill stage would take, in admission
    /// order, greedily bounded by the largest level capacity. Removes
    /// them from the waiting set and marks them in-flight.
    std::vector<Waiting> take_prefill_batch(const CostModel& cm);

    void on_decode_token(int client);
    void on_complete(int client);

    bool client_busy(int client) const { return phase_[client] != Phase::Idle; }
    bool client_decoding(int client) const { return phase_[client] == Phase::Decoding; }
    int active_decodes() const { return active_count_; }
    const std::vector<Waiting>& waiting_prefill() const { return waiting_; }
    const std::vector<std::int64_t>& remain_token() const { return remain_token_; }
    const std::vector<std::vector<int>>& queues() const { return queues_; }
    int request_of(int client) const { return request_of_[client]; }
    bool done() const;

  private:
    enum class Phase { Idle, Waiting, Decoding };

    std::int64_t queue_tokens(int request_id) const;
    int prefill_batch_tokens(const CostModel& cm) const;

    const Trace& trace_;
    OnlineConfig cfg_;
    std::vector<std::vector<int>> queues_;    // per-client, head at back
    std::vector<std::int64_t> remain_token_;  // expected tokens still queued
    std::vector<Waiting> waiting_;            // admitted, not yet prefilled
    std::vector<Phase> phase_;
    std::vector<int> est_remaining_;  // per-client est decode tokens left
    std::vector<int> request_of_;     // per-client in-flight request id
    std::vector<char> started_;       // per-request lifecycle guard
    int active_count_ = 0;
    int queued_count_ = 0;
};

}  // namespace pdsched

#include "pdsched/offline.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace pdsched {

nanos service_time_ns(const Request& r, const CostModel& cm, ServiceMode mode) {
    const int tokens = mode == ServiceMode::Oracle ? r.output_tokens : r.est_output_tokens;
    return tokens * cm.decode_rate_ns();
}

namespace {

struct Item {
    int id;
    nanos t;
};

std::vector<Item> sorted_items(const Trace& trace, const CostModel& cm, ServiceMode mode) {
    std::vector<Item> items;
    items.reserve(trace.requests.size());
    for (const auto& r : trace.requests) items.push_back({r.id, service_time_ns(r, cm, mode)});
    std::sort(items.begin(), items.end(), [](const Item& a, const Item& b) {
        if (a.t != b.t) return a.t > b.t;
        return a.id < b.id;
    });
    return items;
}

Assignment finish(std::vector<int> client_of, std::vector<nanos> loads, bool proven) {
    Assignment a;
    a.client_of = std::move(client_of);
    a.loads_ns = std::move(loads);
    a.makespan_est_ns = *std::max_element(a.loads_ns.begin(), a.loads_ns.end());
    a.proven_optimal = proven;
    return a;
}

}  // namespace

Assignment assign_lpt(const Trace& trace, int clients, const CostModel& cm,
                      ServiceMode mode) {
    check_trace(trace);
    if (clients < 1) throw std::invalid_argument("clients must be >= 1");

    const auto items = sorted_items(trace, cm, mode);
    std::vector<nanos> loads(clients, 0);
    std::vector<int> client_of(trace.size(), -1);
    for (const auto& it : items) {
        int best = 0;
        for (int j = 1; j < clients; ++j)
            if (loads[j] < loads[best]) best = j;
        client_of[it.id] = best;
        loads[best] += it.t;
    }
    return finish(std::move(client_of), std::move(loads), false);
}

namespace {

struct BnB {
    const std::vector<Item>& items;
    int clients;
    std::int64_t budget;
    std::int64_t nodes = 0;
    bool exhausted = false;

    std::vector<nanos> loads;
    std::vector<int> assign;        // per sorted position
    std::vector<nanos> suffix_sum;  // remaining work from position i on

    nanos best = 0;
    std::vector<int> best_assign;

    void dfs(std::size_t pos, nanos cur_max, int used) {
        if (exhausted) return;
        if (++nodes > budget) {
            exhausted = true;
            return;
        }
        if (cur_max >= best) return;
        if (pos == items.size()) {
            best = cur_max;
            best_assign = assign;
            return;
        }
        const int limit = std::min(clients, used + 1);  // client symmetry
        for (int j = 0; j < limit; ++j) {
            const nanos nl = loads[j] + items[pos].t;
            if (nl >= best) continue;
            // Equal-load clients are interchangeable at this node.
            bool dup = false;
            for (int k = 0; k < j && !dup; ++k) dup = loads[k] == loads[j];
            if (dup) continue;
            loads[j] += items[pos].t;
            assign[pos] = j;
            dfs(pos + 1, std::max(cur_max, nl), std::max(used, j + 1));
            loads[j] -= items[pos].t;
            if (exhausted) return;
        }
    }
};

}  // namespace

Assignment assign_exact(const Trace& trace, int clients, const CostModel& cm,
                        ServiceMode mode, const ExactOptions& opts) {
    check_trace(trace);
    if (clients < 1) throw std::invalid_argument("clients must be >= 1");
    if (trace.size() > opts.instance_cap)
        throw std::invalid_argument("instance too large for exact assignment: " +
                                    std::to_string(trace.size()) + " requests > cap " +
                                    std::to_string(opts.instance_cap));

    const auto items = sorted_items(trace, cm, mode);
    Assignment incumbent = assign_lpt(trace, clients, cm, mode);

    BnB bnb{items, clients, opts.node_budget > 0 ? opts.node_budget : 10'000'000};
    bnb.loads.assign(clients, 0);
    bnb.assign.assign(items.size(), -1);
    bnb.suffix_sum.assign(items.size() + 1, 0);
    for (std::size_t i = items.size(); i-- > 0;)
        bnb.suffix_sum[i] = bnb.suffix_sum[i + 1] + items[i].t;
    // If LPT already meets the classical bound it is provably optimal.
    const nanos global_lb =
        std::max(items.front().t, (bnb.suffix_sum[0] + clients - 1) / clients);
    if (incumbent.makespan_est_ns == global_lb) {
        incumbent.proven_optimal = true;
        return incumbent;
    }

    bnb.best = incumbent.makespan_est_ns + 1;  // strict improvement only
    bnb.dfs(0, 0, 0);

    if (bnb.best_assign.empty()) {
        // LPT was already optimal (or the budget ran out before improving).
        incumbent.proven_optimal = !bnb.exhausted;
        return incumbent;
    }
    std::vector<int> client_of(trace.size(), -1);
    std::vector<nanos> loads(clients, 0);
    for (std::size_t i = 0; i < items.size(); ++i) {
        client_of[items[i].id] = bnb.best_assign[i];
        loads[bnb.best_assign[i]] += items[i].t;
    }
    return finish(std::move(client_of), std::move(loads), !bnb.exhausted);
}

LowerBound lower_bound(const Trace& trace, int clients, const CostModel& cm,
                       const LowerBoundOptions& opts) {
    check_trace(trace);
    if (clients < 1) throw std::invalid_argument("clients must be >= 1");

    LowerBound lb;

    // Prefill: the largest level has the best time-per-token ratio, so
    // floor(total input tokens / largest capacity) full top-level
    // stages bound the total prefill time from below.
    std::int64_t total_in = 0;
    for (const auto& r : trace.requests) total_in += r.input_tokens;
    const LevelEntry& top = cm.levels().entries.back();
    const std::int64_t stages = opts.ceil_prefill
                                    ? (total_in + top.capacity_tokens - 1) / top.capacity_tokens
                                    : total_in / top.capacity_tokens;
    lb.prefill_ns = stages * top.duration_ns;

    // Decode: every output token costs the per-token rate, and every
    // decode round pays the fixed overhead. Any schedule needs at least
    // as many rounds as the min-makespan token assignment's largest
    // per-client token count.
    std::int64_t total_out = 0;
    std::int64_t max_out = 0;
    for (const auto& r : trace.requests) {
        const int tokens = opts.mode == ServiceMode::Oracle ? r.output_tokens
                                                            : r.est_output_tokens;
        total_out += tokens;
        max_out = std::max<std::int64_t>(max_out, tokens);
    }
    std::int64_t min_rounds;
    ExactOptions eopts;
    if (trace.size() <= eopts.instance_cap) {
        Assignment opt = assign_exact(trace, clients, cm, opts.mode, eopts);
        if (opt.proven_optimal) {
            min_rounds = opt.makespan_est_ns / cm.decode_rate_ns();
            lb.heuristic_rounds = false;
        } else {
            min_rounds = std::max<std::int64_t>((total_out + clients - 1) / clients, max_out);
            lb.heuristic_rounds = true;
        }
    } else {
        min_rounds = std::max<std::int64_t>((total_out + clients - 1) / clients, max_out);
        lb.heuristic_rounds = true;
    }
    lb.decode_ns = total_out * cm.decode_rate_ns() + min_rounds * cm.decode_overhead_ns();
    lb.total_ns = lb.prefill_ns + lb.decode_ns;
    return lb;
}

}  // namespace pdsched

#include "pdsched/sim.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace pdsched {

namespace {

std::vector<int> round_robin_assignment(int requests, int clients) {
    std::vector<int> client_of(requests);
    for (int i = 0; i < requests; ++i) client_of[i] = i % clients;
    return client_of;
}

OnlineConfig effective_online_config(const SimOptions& opts) {
    OnlineConfig oc = opts.online;
    if (opts.policy == Policy::Baseline || opts.policy == Policy::Offline) {
        oc.steal = false;
        oc.sorted_queues = false;  // FCFS order within each client
    } else {
        oc.sorted_queues = true;
    }
    return oc;
}

}  // namespace

SimResult run(const Trace& trace, int clients, const CostModel& cm,
              const SimOptions& opts) {
    check_trace(trace);
    if (clients < 1) throw std::invalid_argument("clients must be >= 1");

    std::vector<int> client_of;
    if (opts.policy == Policy::Offline || opts.policy == Policy::Hybrid) {
        if (!opts.assignment)
            throw std::invalid_argument("policy " + to_string(opts.policy) +
                                        " requires an offline assignment");
        if (static_cast<int>(opts.assignment->client_of.size()) != trace.size())
            throw std::invalid_argument("assignment references unknown request ids");
        client_of = opts.assignment->client_of;
    } else {
        client_of = round_robin_assignment(trace.size(), clients);
    }

    SimResult res;
    OnlineState st(trace, clients, effective_online_config(opts), client_of);
    std::vector<int> remaining_true(clients, 0);

    auto log = [&](nanos t, std::string what) {
        if (opts.log_events) res.events.push_back({t, std::move(what)});
    };

    // Seed every idle client with its first request.
    for (int j = 0; j < clients; ++j) {
        if (auto r = st.next_request(j)) {
            st.admit(*r, j);
            log(0, "admit request " + std::to_string(*r) + " -> client " + std::to_string(j));
        }
    }

    Schedule& sched = res.schedule;
    nanos now = 0;
    const bool prefill_first =
        opts.policy == Policy::Baseline || opts.policy == Policy::Offline;

    while (!st.done()) {
        const bool any_waiting = !st.waiting_prefill().empty();
        StageKind kind;
        if (prefill_first) {
            kind = any_waiting ? StageKind::Prefill : StageKind::Decode;
        } else {
            kind = st.iteration_decision(cm).kind;
        }

        if (kind == StageKind::Prefill) {
            const auto batch = st.take_prefill_batch(cm);
            int tokens = 0;
            for (const auto& w : batch) tokens += trace.requests[w.request].input_tokens;

            Bin bin;
            bin.index = static_cast<int>(sched.bins.size());
            bin.prefill.start_ns = now;
            bin.prefill.length_ns = cm.prefill_batch_time_ns(tokens);
            bin.prefill.level = cm.prefill_stage_time(tokens).level;
            bin.prefill.total_tokens = tokens;
            for (const auto& w : batch) {
                bin.prefill.members.emplace_back(w.request, w.client);
                remaining_true[w.client] = trace.requests[w.request].output_tokens;
            }
            now += bin.prefill.length_ns;
            bin.decode.start_ns = now;
            sched.bins.push_back(std::move(bin));
            log(now, "prefill bin " + std::to_string(sched.bins.back().index) + ": " +
                         std::to_string(batch.size()) + " requests, " +
                         std::to_string(tokens) + " tokens");
        } else {
            const int active = st.active_decodes();
            // A decode round can only follow a prefill stage.
            Bin& bin = sched.bins.back();
            const nanos dur = cm.decode_round_time_ns(active);
            bin.decode.rounds += 1;
            bin.decode.length_ns += dur;

            std::vector<int> completed;
            for (int j = 0; j < clients; ++j) {
                if (!st.client_decoding(j)) continue;
                auto& slot = bin.decode.per_client[j];
                if (slot.request < 0) slot.request = st.request_of(j);
                slot.tokens += 1;
                st.on_decode_token(j);
                if (--remaining_true[j] == 0) completed.push_back(j);
            }
            now += dur;
            for (int j : completed) {
                log(now, "complete request " + std::to_string(st.request_of(j)) +
                             " on client " + std::to_string(j));
                st.on_complete(j);
                if (auto r = st.next_request(j)) {
                    st.admit(*r, j);
                    log(now, "admit request " + std::to_string(*r) + " -> client " +
                                 std::to_string(j));
                }
            }
        }
    }

    sched.makespan_ns = now;
    res.metrics = compute_metrics(sched, trace, clients, cm);
    return res;
}

std::vector<nanos> decode_round_offsets(const Bin::DecodeStage& stage,
                                        const CostModel& cm) {
    std::vector<int> tokens;
    tokens.reserve(stage.per_client.size());
    for (const auto& [client, slot] : stage.per_client) tokens.push_back(slot.tokens);
    std::sort(tokens.begin(), tokens.end(), std::greater<int>());

    std::vector<nanos> cum(stage.rounds + 1, 0);
    int idx = static_cast<int>(tokens.size());
    for (int r = 1; r <= stage.rounds; ++r) {
        while (idx > 0 && tokens[idx - 1] < r) --idx;
        cum[r] = cum[r - 1] + (idx > 0 ? cm.decode_round_time_ns(idx) : nanos{0});
    }
    return cum;
}

Metrics compute_metrics(const Schedule& schedule, const Trace& trace, int clients,
                        const CostModel& cm) {
    Metrics m;
    std::vector<nanos> busy(clients, 0);
    const int I = trace.size();
    const int K = static_cast<int>(schedule.bins.size());

    std::vector<int> prefill_bin(I, K), last_decode_bin(I, -1), client_of(I, -1);
    for (int k = 0; k < K; ++k) {
        const Bin& bin = schedule.bins[k];
        for (const auto& [req, client] : bin.prefill.members) {
            busy[client] += bin.prefill.length_ns;
            prefill_bin[req] = k;
            client_of[req] = client;
        }
        // A client that decoded k tokens in a bin was active for the
        // bin's first k rounds.
        const auto cum = decode_round_offsets(bin.decode, cm);
        for (const auto& [client, slot] : bin.decode.per_client) {
            busy[client] += cum[slot.tokens];
            last_decode_bin[slot.request] = k;
        }
    }
    // A client holding an in-flight request through a later prefill
    // stage is stalled by that stage, not free: count it busy. Bubbles
    // are the slots with no request at all (or one still waiting).
    for (int i = 0; i < I; ++i)
        for (int k = prefill_bin[i] + 1; k <= last_decode_bin[i]; ++k)
            busy[client_of[i]] += schedule.bins[k].prefill.length_ns;

    std::int64_t total_out = 0;
    for (const auto& r : trace.requests) total_out += r.output_tokens;

    m.makespan_s = ns_to_s(schedule.makespan_ns);
    nanos busy_sum = 0;
    for (int j = 0; j < clients; ++j) {
        m.per_client_busy_ms[j] = ns_to_ms(busy[j]);
        busy_sum += busy[j];
    }
    const double capacity_ns = static_cast<double>(clients) *
                               static_cast<double>(schedule.makespan_ns);
    m.utilization = capacity_ns > 0 ? static_cast<double>(busy_sum) / capacity_ns : 0.0;
    m.generation_speed = m.makespan_s > 0 ? static_cast<double>(total_out) / m.makespan_s : 0.0;
    m.bubbles_ms = ns_to_ms(static_cast<nanos>(capacity_ns) - busy_sum);
    return m;
}

std::string FeasibilityReport::summary() const {
    std::ostringstream out;
    for (const auto& f : families) {
        out << (f.ok ? "PASS " : "FAIL ") << f.name;
        if (!f.ok) out << ": " << f.detail;
        out << '\n';
    }
    return out.str();
}

FeasibilityReport validate_schedule(const Schedule& schedule, const Trace& trace,
                                    int clients, const CostModel& cm) {
    FeasibilityReport rep;
    const int I = trace.size();
    const int K = static_cast<int>(schedule.bins.size());

    // Collected per-request facts.
    std::vector<int> prefill_bin(I, -1), prefill_count(I, 0), client_of(I, -1);
    std::vector<std::int64_t> decoded(I, 0);
    std::vector<int> first_decode_bin(I, K), last_decode_bin(I, -1);
    bool index_ok = true;

    for (int k = 0; k < K; ++k) {
        const Bin& b = schedule.bins[k];
        if (b.index != k) index_ok = false;
        for (const auto& [req, client] : b.prefill.members) {
            if (req < 0 || req >= I || client < 0 || client >= clients) {
                rep.record("instance", false,
                           "prefill member out of range in bin " + std::to_string(k));
                return rep;
            }
            prefill_count[req] += 1;
            prefill_bin[req] = k;
            client_of[req] = client;
        }
    }
    for (int k = 0; k < K; ++k) {
        for (const auto& [client, slot] : schedule.bins[k].decode.per_client) {
            if (slot.request < 0 || slot.request >= I || client < 0 || client >= clients) {
                rep.record("instance", false,
                           "decode slot out of range in bin " + std::to_string(k));
                return rep;
            }
            decoded[slot.request] += slot.tokens;
            first_decode_bin[slot.request] = std::min(first_decode_bin[slot.request], k);
            last_decode_bin[slot.request] = std::max(last_decode_bin[slot.request], k);
        }
    }
    rep.record("bin_indexing", index_ok, "bin index out of order");

    // eq02: makespan is the end of the last stage.
    {
        nanos end = 0;
        for (const auto& b : schedule.bins)
            end = std::max({end, b.prefill.start_ns + b.prefill.length_ns,
                            b.decode.start_ns + b.decode.length_ns});
        rep.record("eq02_makespan", schedule.makespan_ns >= end,
                   "makespan before last stage end");
    }
    // eq03/eq04: stages alternate, prefill_k after decode_{k-1}, decode_k
    // after prefill_k.
    {
        bool ok = true;
        std::string detail;
        for (int k = 0; k < K && ok; ++k) {
            const Bin& b = schedule.bins[k];
            if (k > 0) {
                const Bin& prev = schedule.bins[k - 1];
                if (b.prefill.start_ns < prev.decode.start_ns + prev.decode.length_ns) {
                    ok = false;
                    detail = "prefill " + std::to_string(k) + " starts before decode " +
                             std::to_string(k - 1) + " ends";
                }
            }
            if (ok && b.decode.start_ns < b.prefill.start_ns + b.prefill.length_ns) {
                ok = false;
                detail = "decode " + std::to_string(k) + " starts before its prefill ends";
            }
        }
        rep.record("eq03_eq04_stage_order", ok, detail);
    }
    // eq05: prefill stage length covers its batch (affine law).
    {
        bool ok = true;
        std::string detail;
        for (int k = 0; k < K && ok; ++k) {
            const auto& p = schedule.bins[k].prefill;
            int tokens = 0;
            for (const auto& [req, client] : p.members) tokens += trace.requests[req].input_tokens;
            if (tokens != p.total_tokens) {
                ok = false;
                detail = "bin " + std::to_string(k) + " token total mismatch";
                break;
            }
            if (tokens > 0 && p.length_ns < cm.prefill_batch_time_ns(tokens)) {
                ok = false;
                detail = "bin " + std::to_string(k) + " prefill too short";
            }
        }
        rep.record("eq05_prefill_length", ok, detail);
    }
    // eq06/eq07: one valid level per prefill stage, batch within capacity.
    {
        bool ok = true;
        std::string detail;
        const auto& lv = cm.levels().entries;
        for (int k = 0; k < K && ok; ++k) {
            const auto& p = schedule.bins[k].prefill;
            if (p.level < 1 || p.level > static_cast<int>(lv.size())) {
                ok = false;
                detail = "bin " + std::to_string(k) + " has no valid level";
            } else if (p.total_tokens > lv[p.level - 1].capacity_tokens) {
                ok = false;
                detail = "bin " + std::to_string(k) + " exceeds level capacity";
            }
        }
        rep.record("eq06_eq07_level_capacity", ok, detail);
    }
    // eq08: decode stage length covers every client's tokens, and the
    // recorded length matches the shrinking-batch round reconstruction.
    {
        bool ok = true;
        std::string detail;
        for (int k = 0; k < K && ok; ++k) {
            const auto& d = schedule.bins[k].decode;
            std::vector<int> tokens;
            for (const auto& [client, slot] : d.per_client) {
                if (slot.tokens > d.rounds) {
                    ok = false;
                    detail = "bin " + std::to_string(k) + " client tokens exceed rounds";
                }
                tokens.push_back(slot.tokens);
            }
            if (!ok) break;
            std::sort(tokens.begin(), tokens.end(), std::greater<int>());
            nanos len = 0;
            int idx = static_cast<int>(tokens.size());
            for (int r = 1; r <= d.rounds; ++r) {
                while (idx > 0 && tokens[idx - 1] < r) --idx;
                if (idx > 0) len += cm.decode_round_time_ns(idx);
            }
            if (d.length_ns < len) {
                ok = false;
                detail = "bin " + std::to_string(k) + " decode stage too short";
            }
        }
        rep.record("eq08_decode_length", ok, detail);
    }
    // eq09-eq11: decode starts in the prefill bin and runs consecutively.
    {
        bool ok = true;
        std::string detail;
        for (int i = 0; i < I && ok; ++i) {
            if (prefill_bin[i] < 0) continue;  // caught by eq17
            if (last_decode_bin[i] < 0) {
                ok = false;
                detail = "request " + std::to_string(i) + " never decodes";
                break;
            }
            if (first_decode_bin[i] < prefill_bin[i]) {
                ok = false;
                detail = "request " + std::to_string(i) + " decodes before its prefill";
                break;
            }
            // Consecutive: every bin with decode rounds between the
            // prefill bin and the last decode bin must serve it.
            for (int k = prefill_bin[i]; k <= last_decode_bin[i]; ++k) {
                const auto& d = schedule.bins[k].decode;
                if (d.rounds == 0) continue;
                auto it = d.per_client.find(client_of[i]);
                if (it == d.per_client.end() || it->second.request != i ||
                    it->second.tokens == 0) {
                    ok = false;
                    detail = "request " + std::to_string(i) + " pauses in bin " +
                             std::to_string(k);
                    break;
                }
            }
        }
        rep.record("eq09_eq10_eq11_consecutive_decode", ok, detail);
    }
    // eq12/eq16: at most one request per client per stage. (The decode
    // map is keyed by client; check the decode client matches the
    // request's prefill client and prefill members are unique.)
    {
        bool ok = true;
        std::string detail;
        for (int k = 0; k < K && ok; ++k) {
            std::vector<int> seen;
            for (const auto& [req, client] : schedule.bins[k].prefill.members) {
                if (std::find(seen.begin(), seen.end(), client) != seen.end()) {
                    ok = false;
                    detail = "two prefills on client " + std::to_string(client) +
                             " in bin " + std::to_string(k);
                    break;
                }
                seen.push_back(client);
            }
            if (!ok) break;
            for (const auto& [client, slot] : schedule.bins[k].decode.per_client) {
                if (client_of[slot.request] != client) {
                    ok = false;
                    detail = "request " + std::to_string(slot.request) +
                             " decodes off its prefill client in bin " + std::to_string(k);
                    break;
                }
            }
        }
        rep.record("eq12_eq16_one_request_per_client_stage", ok, detail);
    }
    // eq14/eq15: decode fractions sum to one -- decoded tokens equal
    // the output length exactly.
    {
        bool ok = true;
        std::string detail;
        for (int i = 0; i < I && ok; ++i) {
            if (decoded[i] != trace.requests[i].output_tokens) {
                ok = false;
                detail = "request " + std::to_string(i) + " decoded " +
                         std::to_string(decoded[i]) + " of " +
                         std::to_string(trace.requests[i].output_tokens) + " tokens";
            }
        }
        rep.record("eq14_eq15_token_conservation", ok, detail);
    }
    // eq17/eq18: exactly one prefill and one client per request.
    {
        bool ok = true;
        std::string detail;
        for (int i = 0; i < I && ok; ++i) {
            if (prefill_count[i] != 1) {
                ok = false;
                detail = "request " + std::to_string(i) + " prefilled " +
                         std::to_string(prefill_count[i]) + " times";
            }
        }
        rep.record("eq17_eq18_assignment", ok, detail);
    }
    return rep;
}

BatchSummary run_batch(int case_count, std::uint64_t seed, const BatchConfig& cfg) {
    if (case_count < 1) throw std::invalid_argument("case count must be >= 1");
    const CostModel cm(cfg.cost);

    BatchSummary s;
    double util_delta = 0, speed_delta = 0;
    for (int c = 0; c < case_count; ++c) {
        const std::uint64_t case_seed = seed + static_cast<std::uint64_t>(c);
        const Trace trace = generate_trace(cfg.request_count, case_seed, cfg.params);

        SimOptions base;
        base.policy = Policy::Baseline;
        const SimResult rb = run(trace, cfg.clients, cm, base);

        SimOptions hyb;
        hyb.policy = Policy::Hybrid;
        hyb.assignment = assign_lpt(trace, cfg.clients, cm, ServiceMode::Oracle);
        const SimResult rh = run(trace, cfg.clients, cm, hyb);

        BatchCase row;
        row.case_index = c;
        row.seed = case_seed;
        row.baseline_utilization = rb.metrics.utilization;
        row.hybrid_utilization = rh.metrics.utilization;
        row.baseline_speed = rb.metrics.generation_speed;
        row.hybrid_speed = rh.metrics.generation_speed;
        row.baseline_makespan_s = rb.metrics.makespan_s;
        row.hybrid_makespan_s = rh.metrics.makespan_s;
        s.cases.push_back(row);

        util_delta += row.hybrid_utilization - row.baseline_utilization;
        speed_delta += row.hybrid_speed - row.baseline_speed;
        if (row.hybrid_utilization > row.baseline_utilization) s.hybrid_utilization_wins++;
    }
    s.mean_utilization_delta = util_delta / case_count;
    s.mean_speed_delta = speed_delta / case_count;
    return s;
}

std::string batch_to_csv(const BatchSummary& s) {
    std::ostringstream out;
    out << "case,seed,baseline_utilization,hybrid_utilization,baseline_speed,"
           "hybrid_speed,baseline_makespan_s,hybrid_makespan_s\n";
    out.precision(6);
    out << std::fixed;
    for (const auto& c : s.cases) {
        out << c.case_index << ',' << c.seed << ',' << c.baseline_utilization << ','
            << c.hybrid_utilization << ',' << c.baseline_speed << ',' << c.hybrid_speed
            << ',' << c.baseline_makespan_s << ',' << c.hybrid_makespan_s << '\n';
    }
    return out.str();
}

}  // namespace pdsched

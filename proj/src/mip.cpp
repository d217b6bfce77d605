#include "pdsched/mip.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace pdsched {

namespace {

std::string vn(const char* base, int a) { return std::string(base) + std::to_string(a); }
std::string vn(const char* base, int a, int b) {
    return std::string(base) + std::to_string(a) + "_j" + std::to_string(b);
}
std::string vn3(int i, int j, int k, char fam) {
    return std::string(1, fam) + "_i" + std::to_string(i) + "_j" + std::to_string(j) +
           "_k" + std::to_string(k);
}

void check_instance(const Trace& trace, int clients, const MipOptions& opts) {
    check_trace(trace);
    if (clients < 1) throw std::invalid_argument("clients must be >= 1");
    if (opts.bins < 1) throw std::invalid_argument("bins must be >= 1");
    if (trace.size() > opts.instance_cap)
        throw std::invalid_argument("instance too large: " + std::to_string(trace.size()) +
                                    " requests > cap " + std::to_string(opts.instance_cap));
}

}  // namespace

std::string export_original_mip(const Trace& trace, int clients, const CostModel& cm,
                                const MipOptions& opts) {
    check_instance(trace, clients, opts);
    const int I = trace.size();
    const int J = clients;
    const int K = opts.bins;
    const auto& levels = cm.levels().entries;
    const int L = static_cast<int>(levels.size());
    const double M = opts.big_m;
    const double Td = cm.config().decode_rate_ms;

    std::ostringstream o;
    o.precision(9);
    o << "\\ PD-competition inference scheduling model\n"
      << "\\ I=" << I << " J=" << J << " K=" << K << " L=" << L << " M=" << M << "\n"
      << "Minimize\n obj: tmax\nSubject To\n";

    // eq02: makespan dominates every decode stage end.
    for (int k = 1; k <= K; ++k)
        o << " eq02_k" << k << ": tmax - " << vn("tsd_k", k) << " - " << vn("nd_k", k)
          << " >= 0\n";
    // eq03: prefill k starts after decode k-1 ends.
    for (int k = 2; k <= K; ++k)
        o << " eq03_k" << k << ": " << vn("tsp_k", k) << " - " << vn("tsd_k", k - 1)
          << " - " << vn("nd_k", k - 1) << " >= 0\n";
    // eq04: decode k starts after prefill k ends.
    for (int k = 1; k <= K; ++k)
        o << " eq04_k" << k << ": " << vn("tsd_k", k) << " - " << vn("tsp_k", k) << " - "
          << vn("np_k", k) << " >= 0\n";
    // eq05: prefill stage length from its level.
    for (int k = 1; k <= K; ++k) {
        o << " eq05_k" << k << ": " << vn("np_k", k);
        for (int l = 1; l <= L; ++l)
            o << " - " << ns_to_ms(levels[l - 1].duration_ns) << " y_k" << k << "_l" << l;
        o << " >= 0\n";
    }
    // eq06: batched input tokens within the level capacity.
    for (int k = 1; k <= K; ++k) {
        o << " eq06_k" << k << ":";
        bool first = true;
        for (int i = 1; i <= I; ++i)
            for (int j = 1; j <= J; ++j) {
                o << (first ? " " : " + ") << trace.requests[i - 1].input_tokens << " "
                  << vn3(i, j, k, 'p');
                first = false;
            }
        for (int l = 1; l <= L; ++l)
            o << " - " << levels[l - 1].capacity_tokens << " y_k" << k << "_l" << l;
        o << " <= 0\n";
    }
    // eq07: exactly one level per prefill stage.
    for (int k = 1; k <= K; ++k) {
        o << " eq07_k" << k << ":";
        for (int l = 1; l <= L; ++l) o << (l == 1 ? " " : " + ") << "y_k" << k << "_l" << l;
        o << " = 1\n";
    }
    // eq08: decode stage length covers every client's share.
    for (int j = 1; j <= J; ++j)
        for (int k = 1; k <= K; ++k) {
            o << " eq08_j" << j << "_k" << k << ": " << vn("nd_k", k);
            for (int i = 1; i <= I; ++i)
                o << " - " << Td * trace.requests[i - 1].output_tokens << " "
                  << vn3(i, j, k, 'w');
            o << " >= 0\n";
        }
    // eq09: a prefilled request decodes in the same bin.
    for (int i = 1; i <= I; ++i)
        for (int j = 1; j <= J; ++j)
            for (int k = 1; k <= K; ++k)
                o << " eq09_i" << i << "_j" << j << "_k" << k << ": " << vn3(i, j, k, 'd')
                  << " - " << vn3(i, j, k, 'p') << " >= 0\n";
    // eq10: decode bins of one request are consecutive.
    for (int i = 1; i <= I; ++i)
        for (int j = 1; j <= J; ++j)
            for (int k1 = 1; k1 <= K; ++k1)
                for (int k2 = k1 + 1; k2 <= K; ++k2) {
                    o << " eq10_i" << i << "_j" << j << "_k" << k1 << "_k" << k2 << ": "
                      << (1 - M) << " " << vn3(i, j, k1, 'd');
                    for (int k = k1 + 1; k < k2; ++k) o << " + " << vn3(i, j, k, 'd');
                    o << " - " << (M - 1) << " " << vn3(i, j, k2, 'd')
                      << " >= " << (k2 - k1 + 1 - 2 * M) << "\n";
                }
    // eq11: no decode before the request's prefill.
    for (int i = 1; i <= I; ++i)
        for (int j = 1; j <= J; ++j)
            for (int k1 = 1; k1 <= K; ++k1)
                for (int k2 = 1; k2 < k1; ++k2)
                    o << " eq11_i" << i << "_j" << j << "_k" << k1 << "_k" << k2 << ": " << M
                      << " " << vn3(i, j, k1, 'p') << " + " << vn3(i, j, k2, 'd')
                      << " <= " << M << "\n";
    // eq12: one decoding request per client per stage.
    for (int j = 1; j <= J; ++j)
        for (int k = 1; k <= K; ++k) {
            o << " eq12_j" << j << "_k" << k << ":";
            for (int i = 1; i <= I; ++i) o << (i == 1 ? " " : " + ") << vn3(i, j, k, 'd');
            o << " <= 1\n";
        }
    // eq13: exported verbatim although it never binds.
    for (int i = 1; i <= I; ++i)
        for (int j = 1; j <= J; ++j) {
            o << " eq13_i" << i << "_j" << j << ":";
            for (int k = 1; k <= K; ++k) o << (k == 1 ? " " : " + ") << vn3(i, j, k, 'd');
            o << " <= " << K << "\n";
        }
    // eq14: decode fractions land on the assigned client.
    for (int i = 1; i <= I; ++i)
        for (int j = 1; j <= J; ++j) {
            o << " eq14_i" << i << "_j" << j << ":";
            for (int k = 1; k <= K; ++k) o << (k == 1 ? " " : " + ") << vn3(i, j, k, 'w');
            o << " - " << vn("x_i", i, j) << " = 0\n";
        }
    // eq15: every request fully decoded.
    for (int i = 1; i <= I; ++i) {
        o << " eq15_i" << i << ":";
        bool first = true;
        for (int j = 1; j <= J; ++j)
            for (int k = 1; k <= K; ++k) {
                o << (first ? " " : " + ") << vn3(i, j, k, 'w');
                first = false;
            }
        o << " = 1\n";
    }
    // eq16: one prefilling request per client per stage.
    for (int j = 1; j <= J; ++j)
        for (int k = 1; k <= K; ++k) {
            o << " eq16_j" << j << "_k" << k << ":";
            for (int i = 1; i <= I; ++i) o << (i == 1 ? " " : " + ") << vn3(i, j, k, 'p');
            o << " <= 1\n";
        }
    // eq17: exactly one prefill stage on the assigned client.
    for (int i = 1; i <= I; ++i)
        for (int j = 1; j <= J; ++j) {
            o << " eq17_i" << i << "_j" << j << ":";
            for (int k = 1; k <= K; ++k) o << (k == 1 ? " " : " + ") << vn3(i, j, k, 'p');
            o << " - " << vn("x_i", i, j) << " = 0\n";
        }
    // eq18: one client per request.
    for (int i = 1; i <= I; ++i) {
        o << " eq18_i" << i << ":";
        for (int j = 1; j <= J; ++j) o << (j == 1 ? " " : " + ") << vn("x_i", i, j);
        o << " = 1\n";
    }

    o << "Bounds\n";
    for (int i = 1; i <= I; ++i)
        for (int j = 1; j <= J; ++j)
            for (int k = 1; k <= K; ++k) o << " 0 <= " << vn3(i, j, k, 'w') << " <= 1\n";
    o << "Binaries\n";
    for (int i = 1; i <= I; ++i)
        for (int j = 1; j <= J; ++j) o << " " << vn("x_i", i, j) << "\n";
    for (int k = 1; k <= K; ++k)
        for (int l = 1; l <= L; ++l) o << " y_k" << k << "_l" << l << "\n";
    for (int i = 1; i <= I; ++i)
        for (int j = 1; j <= J; ++j)
            for (int k = 1; k <= K; ++k)
                o << " " << vn3(i, j, k, 'p') << "\n " << vn3(i, j, k, 'd') << "\n";
    o << "End\n";
    return o.str();
}

namespace {

class Checker {
  public:
    Checker(const Valuation& v) : v_(v) {}

    double get(const std::string& name) const {
        auto it = v_.find(name);
        if (it == v_.end()) throw std::invalid_argument("missing variable: " + name);
        return it->second;
    }

  private:
    const Valuation& v_;
};

bool tol_ge(double lhs, double rhs) {
    const double tol = 1e-6 * std::max({1.0, std::fabs(lhs), std::fabs(rhs)});
    return lhs >= rhs - tol;
}
bool tol_eq(double lhs, double rhs) { return tol_ge(lhs, rhs) && tol_ge(rhs, lhs); }

}  // namespace

FeasibilityReport validate_solution(const Valuation& values, const Trace& trace,
                                    int clients, const CostModel& cm,
                                    const MipOptions& opts) {
    check_instance(trace, clients, opts);
    const int I = trace.size();
    const int J = clients;
    const int K = opts.bins;
    const double M = opts.big_m;
    const double Td = cm.config().decode_rate_ms;
    const double Tp = cm.config().prefill_rate_ms;
    const double Op = cm.config().prefill_overhead_ms;
    const Checker c(values);

    FeasibilityReport rep;
    auto family = [&](const std::string& name, auto&& scan) {
        bool ok = true;
        std::string detail;
        scan(ok, detail);
        rep.record(name, ok, detail);
    };

    const double tmax = c.get("tmax");
    family("eq02_makespan", [&](bool& ok, std::string& d) {
        for (int k = 1; k <= K && ok; ++k)
            if (!tol_ge(tmax, c.get(vn("tsd_k", k)) + c.get(vn("nd_k", k)))) {
                ok = false;
                d = "k=" + std::to_string(k);
            }
    });
    family("eq03_bin_order", [&](bool& ok, std::string& d) {
        for (int k = 2; k <= K && ok; ++k)
            if (!tol_ge(c.get(vn("tsp_k", k)),
                        c.get(vn("tsd_k", k - 1)) + c.get(vn("nd_k", k - 1)))) {
                ok = false;
                d = "k=" + std::to_string(k);
            }
    });
    family("eq04_decode_after_prefill", [&](bool& ok, std::string& d) {
        for (int k = 1; k <= K && ok; ++k)
            if (!tol_ge(c.get(vn("tsd_k", k)),
                        c.get(vn("tsp_k", k)) + c.get(vn("np_k", k)))) {
                ok = false;
                d = "k=" + std::to_string(k);
            }
    });
    // Stage length must cover the batched tokens under the measured
    // affine law. Level durations in the exported file quantize this
    // upward, so any solution of the exported model also passes.
    family("eq05_prefill_length", [&](bool& ok, std::string& d) {
        for (int k = 1; k <= K && ok; ++k) {
            double tokens = 0;
            for (int i = 1; i <= I; ++i)
                for (int j = 1; j <= J; ++j)
                    tokens += trace.requests[i - 1].input_tokens * c.get(vn3(i, j, k, 'p'));
            if (tokens > 0.5 && !tol_ge(c.get(vn("np_k", k)), Op + Tp * tokens)) {
                ok = false;
                d = "k=" + std::to_string(k);
            }
        }
    });
    family("eq06_level_capacity", [&](bool& ok, std::string& d) {
        const auto& lv = cm.levels().entries;
        for (int k = 1; k <= K && ok; ++k) {
            double tokens = 0;
            for (int i = 1; i <= I; ++i)
                for (int j = 1; j <= J; ++j)
                    tokens += trace.requests[i - 1].input_tokens * c.get(vn3(i, j, k, 'p'));
            double cap = 0;
            for (const auto& e : lv)
                cap += e.capacity_tokens * c.get("y_k" + std::to_string(k) + "_l" +
                                                 std::to_string(e.level));
            if (!tol_ge(cap, tokens)) {
                ok = false;
                d = "k=" + std::to_string(k);
            }
        }
    });
    family("eq07_one_level", [&](bool& ok, std::string& d) {
        const auto& lv = cm.levels().entries;
        for (int k = 1; k <= K && ok; ++k) {
            double sum = 0;
            for (const auto& e : lv)
                sum += c.get("y_k" + std::to_string(k) + "_l" + std::to_string(e.level));
            if (!tol_eq(sum, 1.0)) {
                ok = false;
                d = "k=" + std::to_string(k);
            }
        }
    });
    family("eq08_decode_length", [&](bool& ok, std::string& d) {
        for (int j = 1; j <= J && ok; ++j)
            for (int k = 1; k <= K && ok; ++k) {
                double share = 0;
                for (int i = 1; i <= I; ++i)
                    share += Td * trace.requests[i - 1].output_tokens *
                             c.get(vn3(i, j, k, 'w'));
                if (!tol_ge(c.get(vn("nd_k", k)), share)) {
                    ok = false;
                    d = "j=" + std::to_string(j) + " k=" + std::to_string(k);
                }
            }
    });
    family("eq09_decode_with_prefill", [&](bool& ok, std::string& d) {
        for (int i = 1; i <= I && ok; ++i)
            for (int j = 1; j <= J && ok; ++j)
                for (int k = 1; k <= K && ok; ++k)
                    if (!tol_ge(c.get(vn3(i, j, k, 'd')), c.get(vn3(i, j, k, 'p')))) {
                        ok = false;
                        d = "i=" + std::to_string(i) + " j=" + std::to_string(j) +
                            " k=" + std::to_string(k);
                    }
    });
    family("eq10_consecutive_decode", [&](bool& ok, std::string& d) {
        for (int i = 1; i <= I && ok; ++i)
            for (int j = 1; j <= J && ok; ++j)
                for (int k1 = 1; k1 <= K && ok; ++k1)
                    for (int k2 = k1 + 1; k2 <= K && ok; ++k2) {
                        double sum = 0;
                        for (int k = k1; k <= k2; ++k) sum += c.get(vn3(i, j, k, 'd'));
                        const double lhs =
                            M * (2 - c.get(vn3(i, j, k1, 'd')) - c.get(vn3(i, j, k2, 'd'))) +
                            sum;
                        if (!tol_ge(lhs, k2 - k1 + 1)) {
                            ok = false;
                            d = "i=" + std::to_string(i) + " j=" + std::to_string(j) +
                                " k1=" + std::to_string(k1) + " k2=" + std::to_string(k2);
                        }
                    }
    });
    family("eq11_no_decode_before_prefill", [&](bool& ok, std::string& d) {
        for (int i = 1; i <= I && ok; ++i)
            for (int j = 1; j <= J && ok; ++j)
                for (int k1 = 1; k1 <= K && ok; ++k1)
                    for (int k2 = 1; k2 < k1 && ok; ++k2)
                        if (!tol_ge(0.0, M * (c.get(vn3(i, j, k1, 'p')) - 1) +
                                             c.get(vn3(i, j, k2, 'd')))) {
                            ok = false;
                            d = "i=" + std::to_string(i) + " j=" + std::to_string(j) +
                                " k1=" + std::to_string(k1) + " k2=" + std::to_string(k2);
                        }
    });
    family("eq12_one_decode_per_client_stage", [&](bool& ok, std::string& d) {
        for (int j = 1; j <= J && ok; ++j)
            for (int k = 1; k <= K && ok; ++k) {
                double sum = 0;
                for (int i = 1; i <= I; ++i) sum += c.get(vn3(i, j, k, 'd'));
                if (!tol_ge(1.0, sum)) {
                    ok = false;
                    d = "j=" + std::to_string(j) + " k=" + std::to_string(k);
                }
            }
    });
    family("eq13_decode_stage_budget", [&](bool& ok, std::string& d) {
        for (int i = 1; i <= I && ok; ++i)
            for (int j = 1; j <= J && ok; ++j) {
                double sum = 0;
                for (int k = 1; k <= K; ++k) sum += c.get(vn3(i, j, k, 'd'));
                if (!tol_ge(static_cast<double>(K), sum)) {
                    ok = false;
                    d = "i=" + std::to_string(i) + " j=" + std::to_string(j);
                }
            }
    });
    family("eq14_fractions_match_assignment", [&](bool& ok, std::string& d) {
        for (int i = 1; i <= I && ok; ++i)
            for (int j = 1; j <= J && ok; ++j) {
                double sum = 0;
                for (int k = 1; k <= K; ++k) sum += c.get(vn3(i, j, k, 'w'));
                if (!tol_eq(sum, c.get(vn("x_i", i, j)))) {
                    ok = false;
                    d = "i=" + std::to_string(i) + " j=" + std::to_string(j);
                }
            }
    });
    family("eq15_fully_decoded", [&](bool& ok, std::string& d) {
        for (int i = 1; i <= I && ok; ++i) {
            double sum = 0;
            for (int j = 1; j <= J; ++j)
                for (int k = 1; k <= K; ++k) sum += c.get(vn3(i, j, k, 'w'));
            if (!tol_eq(sum, 1.0)) {
                ok = false;
                d = "i=" + std::to_string(i);
            }
        }
    });
    family("eq16_one_prefill_per_client_stage", [&](bool& ok, std::string& d) {
        for (int j = 1; j <= J && ok; ++j)
            for (int k = 1; k <= K && ok; ++k) {
                double sum = 0;
                for (int i = 1; i <= I; ++i) sum += c.get(vn3(i, j, k, 'p'));
                if (!tol_ge(1.0, sum)) {
                    ok = false;
                    d = "j=" + std::to_string(j) + " k=" + std::to_string(k);
                }
            }
    });
    family("eq17_one_prefill_per_request", [&](bool& ok, std::string& d) {
        for (int i = 1; i <= I && ok; ++i)
            for (int j = 1; j <= J && ok; ++j) {
                double sum = 0;
                for (int k = 1; k <= K; ++k) sum += c.get(vn3(i, j, k, 'p'));
                if (!tol_eq(sum, c.get(vn("x_i", i, j)))) {
                    ok = false;
                    d = "i=" + std::to_string(i) + " j=" + std::to_string(j);
                }
            }
    });
    family("eq18_one_client_per_request", [&](bool& ok, std::string& d) {
        for (int i = 1; i <= I && ok; ++i) {
            double sum = 0;
            for (int j = 1; j <= J; ++j) sum += c.get(vn("x_i", i, j));
            if (!tol_eq(sum, 1.0)) {
                ok = false;
                d = "i=" + std::to_string(i);
            }
        }
    });
    return rep;
}

Valuation schedule_to_solution(const Schedule& schedule, const Trace& trace,
                               int clients, const CostModel& cm) {
    const int I = trace.size();
    const int J = clients;
    const int K = static_cast<int>(schedule.bins.size());

    Valuation v;
    v["tmax"] = ns_to_ms(schedule.makespan_ns);
    for (int k = 1; k <= K; ++k) {
        const Bin& b = schedule.bins[k - 1];
        v[vn("tsp_k", k)] = ns_to_ms(b.prefill.start_ns);
        v[vn("np_k", k)] = ns_to_ms(b.prefill.length_ns);
        v[vn("tsd_k", k)] = ns_to_ms(b.decode.start_ns);
        v[vn("nd_k", k)] = ns_to_ms(b.decode.length_ns);
    }
    for (int i = 1; i <= I; ++i)
        for (int j = 1; j <= J; ++j) {
            v[vn("x_i", i, j)] = 0;
            for (int k = 1; k <= K; ++k) {
                v[vn3(i, j, k, 'p')] = 0;
                v[vn3(i, j, k, 'd')] = 0;
                v[vn3(i, j, k, 'w')] = 0;
            }
        }

    const int L = static_cast<int>(cm.levels().entries.size());
    for (int k = 1; k <= K; ++k)
        for (int l = 1; l <= L; ++l)
            v["y_k" + std::to_string(k) + "_l" + std::to_string(l)] = 0;

    std::vector<int> prefill_bin(I + 1, 0), last_bin(I + 1, 0), client_of(I + 1, 0);
    for (int k = 1; k <= K; ++k) {
        const Bin& b = schedule.bins[k - 1];
        v["y_k" + std::to_string(k) + "_l" + std::to_string(std::max(1, b.prefill.level))] = 1;
        for (const auto& [req, client] : b.prefill.members) {
            const int i = req + 1, j = client + 1;
            v[vn("x_i", i, j)] = 1;
            v[vn3(i, j, k, 'p')] = 1;
            prefill_bin[i] = k;
            last_bin[i] = k;
            client_of[i] = j;
        }
        for (const auto& [client, slot] : b.decode.per_client) {
            const int i = slot.request + 1, j = client + 1;
            v[vn3(i, j, k, 'w')] =
                static_cast<double>(slot.tokens) / trace.requests[slot.request].output_tokens;
            last_bin[i] = std::max(last_bin[i], k);
        }
    }
    // d spans the consecutive range from the prefill bin to the last
    // decode bin (bridging zero-round decode stages in between).
    for (int i = 1; i <= I; ++i)
        for (int k = prefill_bin[i]; k >= 1 && k <= last_bin[i]; ++k)
            v[vn3(i, client_of[i], k, 'd')] = 1;
    return v;
}

}  // namespace pdsched

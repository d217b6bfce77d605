#include "pdsched/workload.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>
#include <stdexcept>
#include <unordered_set>

#include <json.hpp>

namespace pdsched {

namespace {

// One standard normal draw per call. Box-Muller on explicit 53-bit
// uniforms from mt19937_64 keeps the stream portable across standard
// library implementations (std::normal_distribution is not pinned by
// the standard).
double draw_normal(std::mt19937_64& rng) {
    const double u1 = 1.0 - static_cast<double>(rng() >> 11) * 0x1.0p-53;  // (0,1]
    const double u2 = static_cast<double>(rng() >> 11) * 0x1.0p-53;        // [0,1)
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

int sample_tokens(std::mt19937_64& rng, double mean, double std, int cap) {
    const double v = mean + std * draw_normal(rng);
    long long n = static_cast<long long>(std::floor(v + 0.5));  // round half-up
    if (n < 1) n = 1;
    if (cap > 0 && n > cap) n = cap;
    return static_cast<int>(n);
}

}  // namespace

Trace generate_trace(int count, std::uint64_t seed, const TraceParams& params) {
    if (count < 1) throw std::invalid_argument("trace count must be >= 1");
    if (params.input_std < 0 || params.output_std < 0)
        throw std::invalid_argument("std must be >= 0");
    if (params.output_cap < 0 || (params.output_cap != 0 && params.output_cap < 1))
        throw std::invalid_argument("output cap must be >= 1");

    std::mt19937_64 rng(seed);
    int est = static_cast<int>(std::floor(params.output_mean + 0.5));
    if (est < 1) est = 1;
    if (params.output_cap > 0 && est > params.output_cap) est = params.output_cap;

    Trace t;
    t.seed = seed;
    t.meta = params;
    t.requests.reserve(count);
    for (int i = 0; i < count; ++i) {
        Request r;
        r.id = i;
        r.input_tokens = sample_tokens(rng, params.input_mean, params.input_std, 0);
        r.output_tokens = sample_tokens(rng, params.output_mean, params.output_std,
                                        params.output_cap);
        r.est_output_tokens = est;
        t.requests.push_back(r);
    }
    return t;
}

void check_trace(const Trace& trace) {
    if (trace.requests.empty()) throw std::invalid_argument("empty trace");
    std::unordered_set<int> ids;
    for (const auto& r : trace.requests) {
        if (!ids.insert(r.id).second)
            throw std::invalid_argument("duplicate request id " + std::to_string(r.id));
        if (r.id < 0 || r.id >= trace.size())
            throw std::invalid_argument("request ids must be dense 0..n-1");
        if (r.input_tokens < 1 || r.output_tokens < 1 || r.est_output_tokens < 1)
            throw std::invalid_argument("token counts must be >= 1 (request " +
                                        std::to_string(r.id) + ")");
    }
}

std::string save_trace(const Trace& trace) {
    nlohmann::ordered_json j;
    j["seed"] = trace.seed;
    j["meta"] = {{"input_mean", trace.meta.input_mean},
                 {"input_std", trace.meta.input_std},
                 {"output_mean", trace.meta.output_mean},
                 {"output_std", trace.meta.output_std},
                 {"output_cap", trace.meta.output_cap}};
    auto& reqs = j["requests"] = nlohmann::ordered_json::array();
    for (const auto& r : trace.requests) {
        reqs.push_back({{"id", r.id},
                        {"input_tokens", r.input_tokens},
                        {"output_tokens", r.output_tokens},
                        {"est_output_tokens", r.est_output_tokens}});
    }
    return j.dump(2) + "\n";
}

void save_trace_file(const Trace& trace, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write trace file: " + path);
    out << save_trace(trace);
}

Trace load_trace(std::istream& in) {
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument(std::string("malformed trace: ") + e.what());
    }
    Trace t;
    try {
        t.seed = j.at("seed").get<std::uint64_t>();
        const auto& m = j.at("meta");
        t.meta.input_mean = m.at("input_mean").get<double>();
        t.meta.input_std = m.at("input_std").get<double>();
        t.meta.output_mean = m.at("output_mean").get<double>();
        t.meta.output_std = m.at("output_std").get<double>();
        t.meta.output_cap = m.at("output_cap").get<int>();
        for (const auto& rj : j.at("requests")) {
            Request r;
            r.id = rj.at("id").get<int>();
            r.input_tokens = rj.at("input_tokens").get<int>();
            r.output_tokens = rj.at("output_tokens").get<int>();
            r.est_output_tokens = rj.at("est_output_tokens").get<int>();
            t.requests.push_back(r);
        }
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument(std::string("malformed trace: ") + e.what());
    }
    check_trace(t);
    return t;
}

Trace load_trace_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read trace file: " + path);
    return load_trace(in);
}

TraceStats trace_stats(const Trace& trace) {
    if (trace.requests.empty()) throw std::invalid_argument("empty trace");
    TraceStats s;
    s.count = trace.size();
    double si = 0, so = 0;
    for (const auto& r : trace.requests) {
        si += r.input_tokens;
        so += r.output_tokens;
    }
    s.input_mean = si / s.count;
    s.output_mean = so / s.count;
    double vi = 0, vo = 0;
    for (const auto& r : trace.requests) {
        vi += (r.input_tokens - s.input_mean) * (r.input_tokens - s.input_mean);
        vo += (r.output_tokens - s.output_mean) * (r.output_tokens - s.output_mean);
    }
    s.input_std = std::sqrt(vi / s.count);
    s.output_std = std::sqrt(vo / s.count);
    return s;
}

}  // namespace pdsched

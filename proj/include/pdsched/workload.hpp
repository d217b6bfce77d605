#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace pdsched {

/// One inference job. `output_tokens` is ground truth, revealed to
/// online policies only when the request finishes decoding;
/// `est_output_tokens` is the estimate used wherever the truth may not
/// be consulted.
struct Request {
    int id = 0;
    int input_tokens = 0;
    int output_tokens = 0;
    int est_output_tokens = 0;
};

struct TraceParams {
    double input_mean = 68.43;
    double input_std = 25.04;
    double output_mean = 344.83;
    double output_std = 187.99;
    int output_cap = 512;  // 0 = uncapped
};

struct Trace {
    std::vector<Request> requests;
    std::uint64_t seed = 0;
    TraceParams meta;

    int size() const { return static_cast<int>(requests.size()); }
};

struct TraceStats {
    int count = 0;
    double input_mean = 0, input_std = 0;   // population std
    double output_mean = 0, output_std = 0;
};

/// Deterministic synthetic trace. Token counts are drawn from a normal
/// (mean, std) via the Box-Muller transform on a mersenne-twister-64
/// stream seeded with `seed`, rounded half-up, truncated below at 1;
/// outputs are additionally clamped to the cap. Every request carries
/// the same estimate: the output mean rounded to an integer.
Trace generate_trace(int count, std::uint64_t seed, const TraceParams& params);

Trace load_trace(std::istream& in);
Trace load_trace_file(const std::string& path);
std::string save_trace(const Trace& trace);
void save_trace_file(const Trace& trace, const std::string& path);

TraceStats trace_stats(const Trace& trace);

/// Throws if ids are not dense 0..n-1 or token counts are invalid.
void check_trace(const Trace& trace);

}  // namespace pdsched

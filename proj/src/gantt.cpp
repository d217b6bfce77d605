#include "pdsched/gantt.hpp"

#include <algorithm>
#include <sstream>

#include "pdsched/sim.hpp"

namespace pdsched {

namespace {

struct Segment {
    int client;
    bool prefill;
    nanos start;
    nanos end;
    int request;
};

std::vector<Segment> segments(const Schedule& schedule, const CostModel& cm) {
    std::vector<Segment> segs;
    for (const auto& bin : schedule.bins) {
        for (const auto& [req, client] : bin.prefill.members)
            segs.push_back({client, true, bin.prefill.start_ns,
                            bin.prefill.start_ns + bin.prefill.length_ns, req});
        const auto cum = decode_round_offsets(bin.decode, cm);
        for (const auto& [client, slot] : bin.decode.per_client) {
            if (slot.tokens == 0) continue;
            segs.push_back({client, false, bin.decode.start_ns,
                            bin.decode.start_ns + cum[slot.tokens], slot.request});
        }
    }
    std::sort(segs.begin(), segs.end(), [](const Segment& a, const Segment& b) {
        if (a.client != b.client) return a.client < b.client;
        if (a.start != b.start) return a.start < b.start;
        return a.prefill > b.prefill;
    });
    return segs;
}

}  // namespace

std::string gantt_csv(const Schedule& schedule, const CostModel& cm) {
    std::ostringstream out;
    out << "client,kind,start_ms,end_ms,request_id\n";
    out.precision(6);
    out << std::fixed;
    for (const auto& s : segments(schedule, cm)) {
        out << s.client << ',' << (s.prefill ? "prefill" : "decode") << ','
            << ns_to_ms(s.start) << ',' << ns_to_ms(s.end) << ',' << s.request << '\n';
    }
    return out.str();
}

std::string gantt_svg(const Schedule& schedule, int clients, const CostModel& cm) {
    constexpr int kRowHeight = 10;
    constexpr int kRowGap = 2;
    constexpr int kLeft = 60;
    constexpr double kWidth = 1200.0;

    const double span_ms = std::max(1.0, ns_to_ms(schedule.makespan_ns));
    const double scale = kWidth / span_ms;
    const int height = clients * (kRowHeight + kRowGap) + 40;

    std::ostringstream out;
    out.precision(3);
    out << std::fixed;
    out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
        << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\""
        << static_cast<int>(kWidth) + kLeft + 20 << "\" height=\"" << height << "\">\n"
        << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    for (int j = 0; j < clients; ++j) {
        const int y = 20 + j * (kRowHeight + kRowGap);
        out << "<text x=\"4\" y=\"" << y + kRowHeight - 2
            << "\" font-size=\"8\" fill=\"#555\">c" << j << "</text>\n"
            << "<rect x=\"" << kLeft << "\" y=\"" << y << "\" width=\"" << kWidth
            << "\" height=\"" << kRowHeight << "\" fill=\"#f2f2f2\"/>\n";
    }
    for (const auto& s : segments(schedule, cm)) {
        const int y = 20 + s.client * (kRowHeight + kRowGap);
        const double x = kLeft + ns_to_ms(s.start) * scale;
        const double w = std::max(0.1, (ns_to_ms(s.end) - ns_to_ms(s.start)) * scale);
        out << "<rect x=\"" << x << "\" y=\"" << y << "\" width=\"" << w
            << "\" height=\"" << kRowHeight << "\" fill=\""
            << (s.prefill ? "#e07a5f" : "#3d7ea6") << "\"><title>request "
            << s.request << "</title></rect>\n";
    }
    out << "<text x=\"" << kLeft << "\" y=\"" << height - 8
        << "\" font-size=\"10\" fill=\"#333\">0 .. " << span_ms
        << " ms (prefill: orange, decode: blue)</text>\n</svg>\n";
    return out.str();
}

}  // namespace pdsched

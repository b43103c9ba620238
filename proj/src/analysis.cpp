#include "pulsewave/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#include "pulsewave/capture.hpp"

namespace pulsewave {

MalformedPcap::MalformedPcap(std::uint64_t offset_, std::string reason_)
    : std::runtime_error("malformed pcap at offset " + std::to_string(offset_) +
                         ": " + reason_),
      offset(offset_),
      reason(std::move(reason_)) {}

namespace {

std::uint32_t swap32(std::uint32_t v) {
    return ((v & 0xff) << 24) | ((v & 0xff00) << 8) | ((v >> 8) & 0xff00) |
           (v >> 24);
}
std::uint16_t swap16(std::uint16_t v) {
    return static_cast<std::uint16_t>((v << 8) | (v >> 8));
}

std::uint16_t be16(const std::uint8_t* p) {
    return static_cast<std::uint16_t>((p[0] << 8) | p[1]);
}
std::uint32_t be32(const std::uint8_t* p) {
    return (static_cast<std::uint32_t>(p[0]) << 24) |
           (static_cast<std::uint32_t>(p[1]) << 16) |
           (static_cast<std::uint32_t>(p[2]) << 8) | p[3];
}

struct PcapStream {
    std::ifstream file;
    bool swapped = false;
    std::uint32_t snaplen = 0;
    std::uint64_t offset = 0;

    explicit PcapStream(const std::string& path) {
        file.open(path, std::ios::binary);
        if (!file) throw MalformedPcap(0, "cannot open file");
        PcapGlobalHeader hdr;
        file.read(reinterpret_cast<char*>(&hdr), sizeof hdr);
        if (file.gcount() != sizeof hdr) {
            throw MalformedPcap(0, "file shorter than the 24-byte global header");
        }
        if (hdr.magic_number == 0xa1b2c3d4) {
            swapped = false;
        } else if (hdr.magic_number == 0xd4c3b2a1) {
            swapped = true;
        } else {
            throw MalformedPcap(0, "bad magic number");
        }
        const std::uint16_t major =
            swapped ? swap16(hdr.version_major) : hdr.version_major;
        if (major != 2) throw MalformedPcap(4, "unsupported pcap version");
        const std::uint32_t network = swapped ? swap32(hdr.network) : hdr.network;
        if (network != 1) throw MalformedPcap(20, "linktype is not Ethernet");
        snaplen = swapped ? swap32(hdr.snaplen) : hdr.snaplen;
        offset = sizeof hdr;
    }

    // Returns false at a clean end of file.
    bool next(PcapRecordHeader& rec, std::vector<std::uint8_t>& frame) {
        file.read(reinterpret_cast<char*>(&rec), sizeof rec);
        if (file.gcount() == 0) return false;
        if (file.gcount() != sizeof rec) {
            throw MalformedPcap(offset, "truncated record header");
        }
        if (swapped) {
            rec.ts_sec = swap32(rec.ts_sec);
            rec.ts_usec = swap32(rec.ts_usec);
            rec.incl_len = swap32(rec.incl_len);
            rec.orig_len = swap32(rec.orig_len);
        }
        if (rec.incl_len > snaplen || rec.incl_len > 262144) {
            throw MalformedPcap(offset, "record length exceeds snaplen");
        }
        if (rec.ts_usec >= 1000000) {
            throw MalformedPcap(offset, "timestamp microseconds out of range");
        }
        frame.resize(rec.incl_len);
        file.read(reinterpret_cast<char*>(frame.data()), rec.incl_len);
        if (file.gcount() != static_cast<std::streamsize>(rec.incl_len)) {
            throw MalformedPcap(offset, "truncated record body");
        }
        offset += sizeof rec + rec.incl_len;
        return true;
    }
};

PacketRecord parse_frame(const PcapRecordHeader& rec,
                         std::span<const std::uint8_t> frame) {
    PacketRecord r;
    r.ts_us = static_cast<std::int64_t>(rec.ts_sec) * 1'000'000 + rec.ts_usec;
    r.frame_len = rec.orig_len;
    if (frame.size() < 14) return r;  // runt frame: keep as Other
    const std::uint16_t ethertype = be16(frame.data() + 12);
    if (ethertype != 0x0800) return r;
    const std::uint8_t* ip = frame.data() + 14;
    const std::size_t avail = frame.size() - 14;
    if (avail < 20 || (ip[0] >> 4) != 4) return r;
    const std::size_t ihl = static_cast<std::size_t>(ip[0] & 0x0f) * 4;
    if (ihl < 20 || avail < ihl) return r;
    r.ip_len = be16(ip + 2);
    r.src_addr = be32(ip + 12);
    r.dst_addr = be32(ip + 16);
    const std::uint8_t proto = ip[9];
    const std::uint8_t* tp = ip + ihl;
    const std::size_t tp_avail = avail - ihl;
    if (proto == 6 && tp_avail >= 14) {
        r.proto = RecordProto::Tcp;
        r.src_port = be16(tp);
        r.dst_port = be16(tp + 2);
        r.tcp_flags = tp[13];
    } else if (proto == 17 && tp_avail >= 8) {
        r.proto = RecordProto::Udp;
        r.src_port = be16(tp);
        r.dst_port = be16(tp + 2);
    } else if (proto == 1 && tp_avail >= 8) {
        r.proto = RecordProto::Icmp;
    }
    return r;
}

const char* proto_key(RecordProto p) {
    switch (p) {
        case RecordProto::Tcp: return "tcp";
        case RecordProto::Udp: return "udp";
        case RecordProto::Icmp: return "icmp";
        case RecordProto::Other: return "other";
    }
    return "other";
}

}  // namespace

std::vector<PacketRecord> read_pcap(const std::string& path) {
    PcapStream stream(path);
    std::vector<PacketRecord> out;
    PcapRecordHeader rec;
    std::vector<std::uint8_t> frame;
    while (stream.next(rec, frame)) {
        out.push_back(parse_frame(rec, frame));
    }
    return out;
}

void scan_pcap_frames(
    const std::string& path,
    const std::function<void(std::int64_t, std::span<const std::uint8_t>)>& fn) {
    PcapStream stream(path);
    PcapRecordHeader rec;
    std::vector<std::uint8_t> frame;
    while (stream.next(rec, frame)) {
        fn(static_cast<std::int64_t>(rec.ts_sec) * 1'000'000 + rec.ts_usec,
           frame);
    }
}

std::size_t TimeSeries::bin_count() const {
    std::size_t n = 0;
    for (const auto& [key, bins] : groups) n = std::max(n, bins.size());
    return n;
}

std::vector<BinStat> TimeSeries::total() const {
    std::vector<BinStat> out(bin_count());
    for (const auto& [key, bins] : groups) {
        for (std::size_t i = 0; i < bins.size(); ++i) {
            out[i].bytes += bins[i].bytes;
            out[i].packets += bins[i].packets;
        }
    }
    return out;
}

TimeSeries bin_timeseries(std::span<const PacketRecord> records,
                          std::int64_t bin_width_us, GroupBy group_by,
                          std::optional<double> duration_s) {
    TimeSeries series;
    series.bin_width_us = bin_width_us;
    std::size_t n_bins = 0;
    if (duration_s) {
        n_bins = static_cast<std::size_t>(std::ceil(
            *duration_s * 1e6 / static_cast<double>(bin_width_us)));
    } else {
        for (const PacketRecord& r : records) {
            n_bins = std::max(
                n_bins, static_cast<std::size_t>(r.ts_us / bin_width_us) + 1);
        }
    }
    if (records.empty() && n_bins == 0) return series;

    for (const PacketRecord& r : records) {
        const std::size_t bin = static_cast<std::size_t>(r.ts_us / bin_width_us);
        if (bin >= n_bins) continue;
        std::string key = "all";
        switch (group_by) {
            case GroupBy::None: break;
            case GroupBy::Protocol: key = proto_key(r.proto); break;
            case GroupBy::SrcAddr: key = format_ipv4(r.src_addr); break;
            case GroupBy::DstAddr: key = format_ipv4(r.dst_addr); break;
        }
        auto& bins = series.groups[key];
        if (bins.size() != n_bins) bins.resize(n_bins);
        bins[bin].bytes += r.ip_len;
        bins[bin].packets += 1;
    }
    if (series.groups.empty() && n_bins > 0) {
        series.groups["all"].resize(n_bins);
    }
    // Groups created late still get the full bin span.
    for (auto& [key, bins] : series.groups) bins.resize(n_bins);
    return series;
}

bool VectorSignature::matches(const PacketRecord& r) const {
    switch (protocol) {
        case Protocol::TcpSyn:
            if (r.proto != RecordProto::Tcp) return false;
            if (!(r.tcp_flags & 0x02) || (r.tcp_flags & 0x10)) return false;
            break;
        case Protocol::Udp:
            if (r.proto != RecordProto::Udp) return false;
            break;
        case Protocol::Icmp:
            if (r.proto != RecordProto::Icmp) return false;
            break;
        case Protocol::Mixed:
            if (r.proto == RecordProto::Other) return false;
            if (r.proto == RecordProto::Tcp &&
                (!(r.tcp_flags & 0x02) || (r.tcp_flags & 0x10))) {
                return false;
            }
            break;
    }
    if (dst_port && r.proto != RecordProto::Icmp && r.dst_port != *dst_port) {
        return false;
    }
    return sizes.count(r.ip_len) > 0;
}

std::vector<VectorSignature> signatures_from_config(const ScenarioConfig& cfg) {
    std::vector<VectorSignature> out;
    for (const AttackVector& v : cfg.vectors) {
        VectorSignature sig;
        sig.id = v.id;
        sig.protocol = v.protocol;
        if (!v.dst_port.random) sig.dst_port = v.dst_port.value;
        for (const auto& e : v.sizes.entries) sig.sizes.insert(e.size);
        for (const auto& [name, ov] : v.attackers) {
            if (ov.sizes) {
                for (const auto& e : ov.sizes->entries) sig.sizes.insert(e.size);
            }
        }
        out.push_back(std::move(sig));
    }
    return out;
}

namespace {

// ON seconds from threshold-detected bins: bins whose packet count exceeds
// 10x the median positive bin, or any nonzero bin when the median is zero.
double detect_on_seconds(const std::vector<std::int64_t>& ts_us,
                         std::int64_t width_us) {
    if (ts_us.empty()) return 0.0;
    const std::size_t n_bins = static_cast<std::size_t>(
        *std::max_element(ts_us.begin(), ts_us.end()) / width_us) + 1;
    std::vector<std::uint64_t> bins(n_bins, 0);
    for (std::int64_t t : ts_us) {
        ++bins[static_cast<std::size_t>(t / width_us)];
    }
    std::vector<std::uint64_t> sorted = bins;
    std::sort(sorted.begin(), sorted.end());
    const std::uint64_t median = sorted[sorted.size() / 2];
    std::size_t on = 0;
    for (std::uint64_t b : bins) {
        if (median == 0 ? b > 0 : b > 10 * median) ++on;
    }
    return static_cast<double>(on) * static_cast<double>(width_us) / 1e6;
}

}  // namespace

CompositionReport composition_report(std::span<const PacketRecord> records,
                                     const std::vector<VectorSignature>& sigs,
                                     const Timetable* timetable) {
    CompositionReport report;
    report.vectors.resize(sigs.size());
    for (std::size_t i = 0; i < sigs.size(); ++i) {
        report.vectors[i].id = sigs[i].id;
    }

    // Slack absorbs path delay when checking ON windows at a mid-path
    // vantage point.
    const SimTime slack = to_ns(0.010);
    std::map<std::uint32_t, AttackerShare> by_src;
    std::vector<std::vector<std::int64_t>> ts_of_vector(sigs.size());

    for (const PacketRecord& r : records) {
        int match = -1;
        int n_matches = 0;
        for (std::size_t i = 0; i < sigs.size(); ++i) {
            if (!sigs[i].matches(r)) continue;
            ++n_matches;
            if (match < 0) match = static_cast<int>(i);
            if (n_matches > 1 && timetable) {
                match = -2;  // ambiguous: resolve by window below
                break;
            }
        }
        if (match == -2) {
            const SimTime t = r.ts_us * 1000;
            match = -1;
            for (std::size_t i = 0; i < sigs.size(); ++i) {
                if (!sigs[i].matches(r)) continue;
                if (timetable->active_target(static_cast<int>(i), t) ||
                    timetable->active_target(static_cast<int>(i),
                                             std::max<SimTime>(0, t - slack))) {
                    match = static_cast<int>(i);
                    break;
                }
            }
        }
        if (match < 0) {
            // Benign-looking TCP (ACK/PSH, no SYN) is not attack traffic.
            const bool attack_like =
                r.proto == RecordProto::Udp || r.proto == RecordProto::Icmp ||
                (r.proto == RecordProto::Tcp && (r.tcp_flags & 0x02) &&
                 !(r.tcp_flags & 0x10));
            if (attack_like) ++report.unattributed_packets;
            continue;
        }
        VectorStats& vs = report.vectors[static_cast<std::size_t>(match)];
        ++vs.packets;
        vs.bytes += r.ip_len;
        ++vs.size_histogram[r.ip_len];
        ++report.attributed_packets;
        AttackerShare& share = by_src[r.src_addr];
        share.src_addr = r.src_addr;
        ++share.packets;
        share.bytes += r.ip_len;
        ts_of_vector[static_cast<std::size_t>(match)].push_back(r.ts_us);
    }

    for (std::size_t i = 0; i < sigs.size(); ++i) {
        VectorStats& vs = report.vectors[i];
        if (timetable) {
            vs.on_seconds = to_seconds(timetable->on_time(static_cast<int>(i)));
        } else {
            vs.on_seconds = detect_on_seconds(ts_of_vector[i], 100'000);
        }
        if (vs.on_seconds > 0.0) {
            vs.avg_rate_bps = static_cast<double>(vs.bytes) * 8.0 / vs.on_seconds;
            vs.avg_pps = static_cast<double>(vs.packets) / vs.on_seconds;
        }
    }
    for (const auto& [addr, share] : by_src) report.attackers.push_back(share);

    const std::uint64_t attack_total =
        report.attributed_packets + report.unattributed_packets;
    report.unattributed_warning =
        attack_total > 0 &&
        report.unattributed_packets * 100 > attack_total;
    return report;
}

std::string CompositionReport::format() const {
    std::ostringstream out;
    out << "vector\tpackets\tavg_rate_mbps\tavg_pps\ton_s\tsizes\n";
    char buf[256];
    for (const VectorStats& v : vectors) {
        std::snprintf(buf, sizeof buf, "%s\t%llu\t%.4f\t%.1f\t%.3f\t",
                      v.id.c_str(), static_cast<unsigned long long>(v.packets),
                      v.avg_rate_bps / 1e6, v.avg_pps, v.on_seconds);
        out << buf;
        bool first = true;
        for (const auto& [size, count] : v.size_histogram) {
            if (!first) out << ' ';
            first = false;
            const double pct = v.packets
                                   ? 100.0 * static_cast<double>(count) /
                                         static_cast<double>(v.packets)
                                   : 0.0;
            std::snprintf(buf, sizeof buf, "%u:%.1f%%", size, pct);
            out << buf;
        }
        out << "\n";
    }
    out << "attackers: " << attackers.size() << "\n";
    for (const AttackerShare& a : attackers) {
        std::snprintf(buf, sizeof buf, "  %s packets=%llu bytes=%llu\n",
                      format_ipv4(a.src_addr).c_str(),
                      static_cast<unsigned long long>(a.packets),
                      static_cast<unsigned long long>(a.bytes));
        out << buf;
    }
    if (unattributed_packets) {
        out << "unattributed_attack_packets: " << unattributed_packets
            << (unattributed_warning ? " (warning: > 1%)" : "") << "\n";
    }
    return out.str();
}

double expected_link_load(const Topology& topo, const Timetable& tt,
                          const std::vector<AttackerProfile>& apps,
                          const std::vector<int>& target_nodes, int from_node,
                          int to_node, SimTime t) {
    double load = 0.0;
    for (const AttackerProfile& app : apps) {
        const auto k = tt.active_target(app.vector_idx, t);
        if (!k) continue;
        const int dst = target_nodes[static_cast<std::size_t>(*k)];
        int cur = app.node_id;
        for (int link : topo.routes.path(app.node_id, dst, topo.links)) {
            const int next = topo.links[static_cast<std::size_t>(link)].other(cur);
            if (cur == from_node && next == to_node) {
                load += app.rate_bps;
                break;
            }
            cur = next;
        }
    }
    return load;
}

void export_csv(const TimeSeries& series, const std::string& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw IoError("cannot open " + path);
    out << "bin_start_s,group,bytes,packets\n";
    char buf[64];
    for (const auto& [key, bins] : series.groups) {
        for (std::size_t i = 0; i < bins.size(); ++i) {
            const double start = static_cast<double>(
                                     static_cast<std::int64_t>(i) *
                                     series.bin_width_us) /
                                 1e6;
            std::snprintf(buf, sizeof buf, "%.6f", start);
            out << buf << ',' << key << ',' << bins[i].bytes << ','
                << bins[i].packets << "\n";
        }
    }
    if (!out) throw IoError("write failed on " + path);
}

TimeSeries import_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path);
    TimeSeries series;
    std::string line;
    if (!std::getline(in, line) || line != "bin_start_s,group,bytes,packets") {
        throw IoError("unexpected CSV header in " + path);
    }
    struct Row {
        double start;
        std::string group;
        std::uint64_t bytes;
        std::uint64_t packets;
    };
    std::vector<Row> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        Row row;
        std::size_t p1 = line.find(',');
        std::size_t p2 = line.find(',', p1 + 1);
        std::size_t p3 = line.find(',', p2 + 1);
        if (p1 == std::string::npos || p2 == std::string::npos ||
            p3 == std::string::npos) {
            throw IoError("bad CSV row: " + line);
        }
        row.start = std::stod(line.substr(0, p1));
        row.group = line.substr(p1 + 1, p2 - p1 - 1);
        row.bytes = std::stoull(line.substr(p2 + 1, p3 - p2 - 1));
        row.packets = std::stoull(line.substr(p3 + 1));
        rows.push_back(std::move(row));
    }
    // Bin width from the smallest positive start (bins are contiguous).
    double width_s = 0.0;
    for (const Row& r : rows) {
        if (r.start > 0.0 && (width_s == 0.0 || r.start < width_s)) {
            width_s = r.start;
        }
    }
    if (width_s == 0.0) width_s = 0.1;
    series.bin_width_us = static_cast<std::int64_t>(std::llround(width_s * 1e6));
    for (const Row& r : rows) {
        const std::size_t bin = static_cast<std::size_t>(
            std::llround(r.start * 1e6 / static_cast<double>(series.bin_width_us)));
        auto& bins = series.groups[r.group];
        if (bins.size() <= bin) bins.resize(bin + 1);
        bins[bin].bytes = r.bytes;
        bins[bin].packets = r.packets;
    }
    return series;
}

void export_svg(const TimeSeries& series, const std::string& path,
                const std::string& title) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw IoError("cannot open " + path);

    const double width_s = static_cast<double>(series.bin_width_us) / 1e6;
    const std::size_t n = series.bin_count();
    double max_rate = 0.0;
    for (const auto& [key, bins] : series.groups) {
        for (const BinStat& b : bins) {
            max_rate = std::max(max_rate,
                                static_cast<double>(b.bytes) * 8.0 / width_s);
        }
    }
    if (max_rate <= 0.0) max_rate = 1.0;
    const double t_end = static_cast<double>(n) * width_s;

    const int w = 900, h = 320;
    const int ml = 70, mr = 140, mt = 30, mb = 40;
    const double pw = w - ml - mr, ph = h - mt - mb;
    auto x_of = [&](double t) { return ml + t / t_end * pw; };
    auto y_of = [&](double r) { return mt + ph - r / max_rate * ph; };

    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\""
        << w << "\" height=\"" << h << "\">\n";
    out << "<rect width=\"" << w << "\" height=\"" << h << "\" fill=\"white\"/>\n";
    if (!title.empty()) {
        out << "<text x=\"" << ml << "\" y=\"18\" font-size=\"13\">" << title
            << "</text>\n";
    }
    out << "<line x1=\"" << ml << "\" y1=\"" << mt + ph << "\" x2=\"" << ml + pw
        << "\" y2=\"" << mt + ph << "\" stroke=\"black\"/>\n";
    out << "<line x1=\"" << ml << "\" y1=\"" << mt << "\" x2=\"" << ml
        << "\" y2=\"" << mt + ph << "\" stroke=\"black\"/>\n";
    for (int i = 0; i <= 5; ++i) {
        const double t = t_end * i / 5.0;
        const double r = max_rate * i / 5.0;
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.1f", t);
        out << "<text x=\"" << x_of(t) << "\" y=\"" << mt + ph + 16
            << "\" font-size=\"10\" text-anchor=\"middle\">" << buf
            << "</text>\n";
        std::snprintf(buf, sizeof buf, "%.2g", r / 1e6);
        out << "<text x=\"" << ml - 6 << "\" y=\"" << y_of(r) + 3
            << "\" font-size=\"10\" text-anchor=\"end\">" << buf << "</text>\n";
    }
    out << "<text x=\"" << ml + pw / 2 << "\" y=\"" << h - 6
        << "\" font-size=\"11\" text-anchor=\"middle\">time [s]</text>\n";
    out << "<text x=\"14\" y=\"" << mt + ph / 2
        << "\" font-size=\"11\" text-anchor=\"middle\" transform=\"rotate(-90 14 "
        << mt + ph / 2 << ")\">rate [Mbit/s]</text>\n";

    static const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                    "#9467bd", "#8c564b", "#17becf", "#7f7f7f"};
    int color_idx = 0;
    int legend_y = mt + 10;
    for (const auto& [key, bins] : series.groups) {
        const char* color = kColors[color_idx++ % 8];
        out << "<path fill=\"none\" stroke=\"" << color
            << "\" stroke-width=\"1.2\" d=\"";
        for (std::size_t i = 0; i < bins.size(); ++i) {
            const double t0 = static_cast<double>(i) * width_s;
            const double rate = static_cast<double>(bins[i].bytes) * 8.0 / width_s;
            // Step plot: horizontal segment per bin.
            out << (i == 0 ? 'M' : 'L') << x_of(t0) << ' ' << y_of(rate) << ' '
                << 'L' << x_of(t0 + width_s) << ' ' << y_of(rate) << ' ';
        }
        out << "\"/>\n";
        out << "<rect x=\"" << ml + pw + 10 << "\" y=\"" << legend_y - 8
            << "\" width=\"10\" height=\"10\" fill=\"" << color << "\"/>\n";
        out << "<text x=\"" << ml + pw + 24 << "\" y=\"" << legend_y + 1
            << "\" font-size=\"10\">" << key << "</text>\n";
        legend_y += 16;
    }
    out << "</svg>\n";
    if (!out) throw IoError("write failed on " + path);
}

}  // namespace pulsewave

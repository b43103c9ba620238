#include "pulsewave/capture.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

namespace pulsewave {

namespace {

bool is_id_token(const std::string& s) {
    if (s.empty()) return false;
    return std::all_of(s.begin(), s.end(), [](unsigned char c) {
        return std::isalnum(c) || c == '-';
    });
}

}  // namespace

std::string capture_filename(const std::string& prefix, const std::string& from_id,
                             const std::string& to_id, const std::string& suffix) {
    if (!is_id_token(from_id)) {
        throw InvalidToken("capture FromID '" + from_id + "' is not a token");
    }
    if (!is_id_token(to_id)) {
        throw InvalidToken("capture ToID '" + to_id + "' is not a token");
    }
    for (const std::string* s : {&prefix, &suffix}) {
        if (s->empty() || s->find("__") != std::string::npos ||
            s->find('/') != std::string::npos) {
            throw InvalidToken("capture prefix/suffix '" + *s + "' is not a token");
        }
    }
    return prefix + "__" + from_id + "-to-" + to_id + "__" + suffix + ".pcap";
}

void PcapWriter::open(const std::string& path) {
    path_ = path;
    file_.open(path, std::ios::binary | std::ios::trunc);
    if (!file_) throw IoError("cannot open capture file " + path);
    PcapGlobalHeader hdr;
    file_.write(reinterpret_cast<const char*>(&hdr), sizeof hdr);
    if (!file_) throw IoError("write failed on " + path);
}

void PcapWriter::append(SimTime t, std::uint16_t src_node, std::uint16_t dst_node,
                        std::span<const std::uint8_t> ip_datagram) {
    PcapRecordHeader rec;
    rec.ts_sec = static_cast<std::uint32_t>(t / kNsPerSec);
    std::uint32_t usec =
        static_cast<std::uint32_t>((t % kNsPerSec + 500) / 1000);
    if (usec == 1000000) {  // carry from the half-up rounding
        rec.ts_sec += 1;
        usec = 0;
    }
    rec.ts_usec = usec;
    rec.incl_len = static_cast<std::uint32_t>(ip_datagram.size()) + 14;
    rec.orig_len = rec.incl_len;

    std::uint8_t eth[14] = {};
    eth[0] = 0x02;
    eth[4] = static_cast<std::uint8_t>(dst_node >> 8);
    eth[5] = static_cast<std::uint8_t>(dst_node & 0xff);
    eth[6] = 0x02;
    eth[10] = static_cast<std::uint8_t>(src_node >> 8);
    eth[11] = static_cast<std::uint8_t>(src_node & 0xff);
    eth[12] = 0x08;
    eth[13] = 0x00;

    file_.write(reinterpret_cast<const char*>(&rec), sizeof rec);
    file_.write(reinterpret_cast<const char*>(eth), sizeof eth);
    file_.write(reinterpret_cast<const char*>(ip_datagram.data()),
                static_cast<std::streamsize>(ip_datagram.size()));
    if (!file_) throw IoError("write failed on " + path_);
    ++packets;
    bytes += rec.incl_len;
}

void PcapWriter::close() {
    if (file_.is_open()) {
        file_.close();
        if (file_.fail()) throw IoError("close failed on " + path_);
    }
}

std::vector<std::unique_ptr<CapturePoint>> open_capture_points(
    const Topology& topo, const CaptureSpec& spec, const std::string& out_dir) {
    std::vector<std::unique_ptr<CapturePoint>> points;
    auto add = [&](const Link& l, int from, int to) {
        auto cp = std::make_unique<CapturePoint>();
        cp->link_id = l.id;
        cp->from_node = from;
        cp->to_node = to;
        cp->file_name = capture_filename(spec.prefix, topo.node(from).name,
                                         topo.node(to).name, spec.suffix);
        cp->writer.open(out_dir + "/" + cp->file_name);
        points.push_back(std::move(cp));
    };
    for (const Link& l : topo.links) {
        if (!l.cn_side && !spec.as_links) continue;
        add(l, l.node_a, l.node_b);
        if (spec.bidirectional) add(l, l.node_b, l.node_a);
    }
    return points;
}

void write_run_log(const std::string& path, const ScenarioConfig& cfg,
                   const Topology& topo, const Timetable& tt,
                   const RunReport& report) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw IoError("cannot open run log " + path);

    out << "# run log\n";
    out << "scenario: " << cfg.name << "\n";
    out << "seed: " << cfg.seed << "\n";
    out << "status: " << (report.complete ? "complete" : "partial") << "\n";
    if (!report.complete) {
        out << "# capture files below are partial\n";
    }
    out << "wallclock_ms: " << report.wallclock_ms << "\n";
    out << "\n[config]\n" << serialize_config(cfg);
    out << "\n[topology]\n" << topo.dump_edges();
    out << "\n[timetable]\n";
    std::vector<std::string> target_names = cfg.targets;
    out << tt.format(cfg.vectors, target_names);
    out << "\n[captures]\n";
    for (const CaptureCounters& c : report.captures) {
        out << c.file << " packets=" << c.packets << " bytes=" << c.bytes << "\n";
    }
    out << "\n[links]\n";
    for (const LinkDirCounters& l : report.links) {
        out << l.from << " -> " << l.to << " tx=" << l.tx << " rx=" << l.rx
            << " drop=" << l.drop << " residual=" << l.residual << "\n";
    }
    out << "\n[totals]\n";
    out << "events: " << report.events_executed << "\n";
    out << "attack_packets: " << report.attack_packets << "\n";
    out << "benign_packets: " << report.benign_packets << "\n";
    out << "delivered_packets: " << report.delivered_packets << "\n";
    out << "dropped_packets: " << report.dropped_packets << "\n";
    if (!out) throw IoError("write failed on " + path);
}

}  // namespace pulsewave

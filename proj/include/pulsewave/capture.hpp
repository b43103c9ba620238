#ifndef PULSEWAVE_CAPTURE_HPP
#define PULSEWAVE_CAPTURE_HPP

#include <cstdint>
#include <fstream>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "pulsewave/config.hpp"
#include "pulsewave/schedule.hpp"
#include "pulsewave/time.hpp"
#include "pulsewave/topology.hpp"

namespace pulsewave {

// Per-directed-link packet capture in classic pcap (magic 0xa1b2c3d4,
// version 2.4, microsecond timestamps, linktype Ethernet). Frames carry a
// synthetic Ethernet header with MACs derived from node ids.

struct InvalidToken : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Exact pattern {prefix}__{FromID}-to-{ToID}__{suffix}.pcap.
// FromID/ToID must be tokens of [A-Za-z0-9-].
std::string capture_filename(const std::string& prefix, const std::string& from_id,
                             const std::string& to_id, const std::string& suffix);

#pragma pack(push, 1)
struct PcapGlobalHeader {
    std::uint32_t magic_number = 0xa1b2c3d4;
    std::uint16_t version_major = 2;
    std::uint16_t version_minor = 4;
    std::int32_t thiszone = 0;
    std::uint32_t sigfigs = 0;
    std::uint32_t snaplen = 65535;
    std::uint32_t network = 1;  // Ethernet
};

struct PcapRecordHeader {
    std::uint32_t ts_sec = 0;
    std::uint32_t ts_usec = 0;
    std::uint32_t incl_len = 0;
    std::uint32_t orig_len = 0;
};
#pragma pack(pop)

class PcapWriter {
public:
    PcapWriter() = default;

    void open(const std::string& path);
    // Writes one record: synthetic Ethernet header plus the IP datagram.
    // ts_usec is rounded half-up from the nanosecond clock.
    void append(SimTime t, std::uint16_t src_node, std::uint16_t dst_node,
                std::span<const std::uint8_t> ip_datagram);
    void close();
    bool is_open() const { return file_.is_open(); }

    std::uint64_t packets = 0;
    std::uint64_t bytes = 0;  // frame bytes written (headers excluded)

private:
    std::ofstream file_;
    std::string path_;
};

struct CapturePoint {
    int link_id = -1;
    int from_node = -1;
    int to_node = -1;
    std::string file_name;
    PcapWriter writer;
};

// One capture point per directed CN-side link (CN-CN and CN-gateway), the
// egress direction of from_node; both directions when bidirectional.
// as_links extends capture to AS-internal star links.
std::vector<std::unique_ptr<CapturePoint>> open_capture_points(
    const Topology& topo, const CaptureSpec& spec, const std::string& out_dir);

struct LinkDirCounters {
    std::string from;
    std::string to;
    std::uint64_t tx = 0;        // packets that began transmission
    std::uint64_t rx = 0;        // packets delivered to the far end
    std::uint64_t drop = 0;      // drop-tail losses
    std::uint64_t residual = 0;  // queued or in flight at sim end
};

struct CaptureCounters {
    std::string file;
    std::uint64_t packets = 0;
    std::uint64_t bytes = 0;
};

struct RunReport {
    bool complete = false;  // false when aborted; capture files are partial
    std::uint64_t events_executed = 0;
    std::uint64_t attack_packets = 0;
    std::uint64_t benign_packets = 0;
    std::uint64_t delivered_packets = 0;
    std::uint64_t dropped_packets = 0;
    double wallclock_ms = 0.0;
    std::vector<LinkDirCounters> links;
    std::vector<CaptureCounters> captures;
};

// Unified reproduction log: resolved config, seed, topology edge list,
// first-cycle timetable, per-capture-point counters, runtime.
void write_run_log(const std::string& path, const ScenarioConfig& cfg,
                   const Topology& topo, const Timetable& tt,
                   const RunReport& report);

}  // namespace pulsewave

#endif

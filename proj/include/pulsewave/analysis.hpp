#ifndef PULSEWAVE_ANALYSIS_HPP
#define PULSEWAVE_ANALYSIS_HPP

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "pulsewave/config.hpp"
#include "pulsewave/schedule.hpp"
#include "pulsewave/time.hpp"
#include "pulsewave/topology.hpp"
#include "pulsewave/traffic.hpp"

namespace pulsewave {

// Reads generated pcaps, computes binned time series and per-vector /
// per-attacker composition, and compares measured link load against the
// analytic model.

struct MalformedPcap : std::runtime_error {
    std::uint64_t offset;
    std::string reason;
    MalformedPcap(std::uint64_t offset_, std::string reason_);
};

enum class RecordProto : std::uint8_t { Tcp, Udp, Icmp, Other };

struct PacketRecord {
    std::int64_t ts_us = 0;       // capture timestamp, microseconds
    std::uint32_t frame_len = 0;  // on-wire frame length
    std::uint32_t ip_len = 0;     // IP datagram length (0 for non-IPv4)
    RecordProto proto = RecordProto::Other;
    std::uint8_t tcp_flags = 0;
    std::uint32_t src_addr = 0;
    std::uint32_t dst_addr = 0;
    std::uint16_t src_port = 0;
    std::uint16_t dst_port = 0;

    double ts_seconds() const { return static_cast<double>(ts_us) / 1e6; }
};

// Strict classic-pcap reader (both byte orders, microsecond resolution,
// linktype Ethernet). Order preserved. Throws MalformedPcap.
std::vector<PacketRecord> read_pcap(const std::string& path);

// Streams raw frames (Ethernet header + payload) for conformance checks.
void scan_pcap_frames(
    const std::string& path,
    const std::function<void(std::int64_t ts_us,
                             std::span<const std::uint8_t> frame)>& fn);

enum class GroupBy : std::uint8_t { None, Protocol, SrcAddr, DstAddr };

struct BinStat {
    std::uint64_t bytes = 0;  // IP bytes
    std::uint64_t packets = 0;
    bool operator==(const BinStat&) const = default;
};

struct TimeSeries {
    std::int64_t bin_width_us = 100'000;
    // Group key -> contiguous half-open bins aligned to t = 0. Ungrouped
    // series use the single key "all".
    std::map<std::string, std::vector<BinStat>> groups;
    bool operator==(const TimeSeries&) const = default;

    std::size_t bin_count() const;
    // Bin-wise sum across groups.
    std::vector<BinStat> total() const;
};

TimeSeries bin_timeseries(std::span<const PacketRecord> records,
                          std::int64_t bin_width_us, GroupBy group_by,
                          std::optional<double> duration_s = std::nullopt);

// Signature for attributing capture traffic to a configured vector without
// relying on in-run provenance: protocol class, fixed destination port
// when the vector pins one, and the packet-size population.
struct VectorSignature {
    std::string id;
    Protocol protocol = Protocol::Udp;
    std::optional<std::uint16_t> dst_port;  // nullopt = randomized
    std::set<std::uint32_t> sizes;
    bool matches(const PacketRecord& r) const;
};

std::vector<VectorSignature> signatures_from_config(const ScenarioConfig& cfg);

struct VectorStats {
    std::string id;
    std::uint64_t packets = 0;
    std::uint64_t bytes = 0;
    double on_seconds = 0.0;  // denominator used for the averages
    double avg_rate_bps = 0.0;
    double avg_pps = 0.0;
    std::map<std::uint32_t, std::uint64_t> size_histogram;
};

struct AttackerShare {
    std::uint32_t src_addr = 0;
    std::uint64_t packets = 0;
    std::uint64_t bytes = 0;
};

struct CompositionReport {
    std::vector<VectorStats> vectors;
    std::vector<AttackerShare> attackers;  // attack traffic per source
    std::uint64_t attributed_packets = 0;
    std::uint64_t unattributed_packets = 0;
    bool unattributed_warning = false;  // > 1% of attack packets unattributed

    std::string format() const;
};

// Attribution uses the signatures; when a timetable is supplied, packets
// matching several signatures disambiguate by the vector whose ON window
// covers the timestamp (with slack for path delay), and ON durations come
// from the timetable. Without one, ON time is threshold-detected from the
// binned series (bins above 10x the positive median).
CompositionReport composition_report(std::span<const PacketRecord> records,
                                     const std::vector<VectorSignature>& sigs,
                                     const Timetable* timetable = nullptr);

// Analytic nominal load (jitter expectation taken as 1) on the directed
// link from_node -> to_node at time t: the sum of r-bar over attacker apps
// whose active target's route crosses that link.
double expected_link_load(const Topology& topo, const Timetable& tt,
                          const std::vector<AttackerProfile>& apps,
                          const std::vector<int>& target_nodes, int from_node,
                          int to_node, SimTime t);

// CSV with header "bin_start_s,group,bytes,packets"; lossless round trip.
void export_csv(const TimeSeries& series, const std::string& path);
TimeSeries import_csv(const std::string& path);

// Static SVG 1.1 step plot of bit/s vs time, one path per group.
void export_svg(const TimeSeries& series, const std::string& path,
                const std::string& title = {});

}  // namespace pulsewave

#endif

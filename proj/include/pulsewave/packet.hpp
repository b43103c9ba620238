#ifndef PULSEWAVE_PACKET_HPP
#define PULSEWAVE_PACKET_HPP

#include <cstdint>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace pulsewave {

// Raw IPv4 datagram construction. Packets carry provenance tags
// (attacker/vector) for in-run bookkeeping; the tags are never serialized.

enum class IpProto : std::uint8_t { Tcp = 6, Udp = 17, Icmp = 1 };

constexpr std::uint8_t kTcpFlagSyn = 0x02;
constexpr std::uint8_t kTcpFlagAck = 0x10;
constexpr std::uint8_t kTcpFlagPsh = 0x08;

struct SizeTooSmall : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Packet {
    std::uint32_t src_addr = 0;
    std::uint32_t dst_addr = 0;
    IpProto protocol = IpProto::Udp;
    std::uint8_t tcp_flags = 0;        // TCP only
    std::uint16_t src_port = 0;        // 0 for ICMP
    std::uint16_t dst_port = 0;
    std::uint32_t total_size = 0;      // IP datagram length, bytes
    std::vector<std::uint8_t> bytes;   // the full IP datagram

    // Provenance (not serialized): -1 = benign traffic.
    int attacker_node = -1;
    int vector_idx = -1;
};

using PacketPtr = std::shared_ptr<const Packet>;

// Minimum datagram size for a protocol: IPv4 20 B + TCP 20 / UDP 8 / ICMP 8.
std::uint32_t min_packet_size(IpProto proto);

// One's-complement sum over a byte range (the standard folding).
std::uint16_t inet_checksum(std::span<const std::uint8_t> data);

struct PacketFields {
    std::uint32_t src_addr = 0;
    std::uint32_t dst_addr = 0;
    IpProto protocol = IpProto::Udp;
    std::uint8_t tcp_flags = 0;
    std::uint16_t src_port = 0;
    std::uint16_t dst_port = 0;
    std::uint32_t total_size = 0;
    std::uint16_t ip_id = 0;
    std::uint32_t tcp_seq = 0;
    std::uint16_t icmp_id = 0;
    std::uint16_t icmp_seq = 0;
};

// Builds the IP datagram with valid IP and transport checksums and
// zero-filled payload padding. Throws SizeTooSmall below the protocol
// minimum.
Packet craft_packet(const PacketFields& fields);

// Re-parses a crafted datagram and verifies every checksum; used by tests
// and the capture conformance checks. Returns an empty string when valid,
// otherwise a description of the first problem.
std::string verify_datagram(std::span<const std::uint8_t> bytes);

}  // namespace pulsewave

#endif

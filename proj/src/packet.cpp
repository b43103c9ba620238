#include "pulsewave/packet.hpp"

#include <cstring>

namespace pulsewave {

namespace {

void put16(std::uint8_t* p, std::uint16_t v) {
    p[0] = static_cast<std::uint8_t>(v >> 8);
    p[1] = static_cast<std::uint8_t>(v & 0xff);
}

void put32(std::uint8_t* p, std::uint32_t v) {
    p[0] = static_cast<std::uint8_t>(v >> 24);
    p[1] = static_cast<std::uint8_t>(v >> 16);
    p[2] = static_cast<std::uint8_t>(v >> 8);
    p[3] = static_cast<std::uint8_t>(v & 0xff);
}

std::uint16_t get16(const std::uint8_t* p) {
    return static_cast<std::uint16_t>((p[0] << 8) | p[1]);
}

std::uint32_t sum_range(const std::uint8_t* p, std::size_t len) {
    std::uint32_t sum = 0;
    for (std::size_t i = 0; i + 1 < len; i += 2) {
        sum += static_cast<std::uint32_t>((p[i] << 8) | p[i + 1]);
    }
    if (len % 2) sum += static_cast<std::uint32_t>(p[len - 1] << 8);
    return sum;
}

std::uint16_t fold(std::uint32_t sum) {
    while (sum >> 16) sum = (sum & 0xffff) + (sum >> 16);
    return static_cast<std::uint16_t>(~sum & 0xffff);
}

// Pseudo-header sum for TCP/UDP.
std::uint32_t pseudo_sum(std::uint32_t src, std::uint32_t dst,
                         std::uint8_t proto, std::uint16_t seg_len) {
    std::uint32_t sum = 0;
    sum += src >> 16;
    sum += src & 0xffff;
    sum += dst >> 16;
    sum += dst & 0xffff;
    sum += proto;
    sum += seg_len;
    return sum;
}

}  // namespace

std::uint32_t min_packet_size(IpProto proto) {
    switch (proto) {
        case IpProto::Tcp: return 40;
        case IpProto::Udp: return 28;
        case IpProto::Icmp: return 28;
    }
    return 28;
}

std::uint16_t inet_checksum(std::span<const std::uint8_t> data) {
    return fold(sum_range(data.data(), data.size()));
}

Packet craft_packet(const PacketFields& f) {
    if (f.total_size < min_packet_size(f.protocol)) {
        throw SizeTooSmall("packet size " + std::to_string(f.total_size) +
                           " below minimum " +
                           std::to_string(min_packet_size(f.protocol)));
    }
    if (f.total_size > 65535) {
        throw SizeTooSmall("packet size exceeds 65535");
    }

    Packet pkt;
    pkt.src_addr = f.src_addr;
    pkt.dst_addr = f.dst_addr;
    pkt.protocol = f.protocol;
    pkt.tcp_flags = f.tcp_flags;
    pkt.src_port = f.protocol == IpProto::Icmp ? 0 : f.src_port;
    pkt.dst_port = f.protocol == IpProto::Icmp ? 0 : f.dst_port;
    pkt.total_size = f.total_size;
    pkt.bytes.assign(f.total_size, 0);
    std::uint8_t* ip = pkt.bytes.data();

    ip[0] = 0x45;  // version 4, IHL 5
    put16(ip + 2, static_cast<std::uint16_t>(f.total_size));
    put16(ip + 4, f.ip_id);
    ip[8] = 64;  // TTL
    ip[9] = static_cast<std::uint8_t>(f.protocol);
    put32(ip + 12, f.src_addr);
    put32(ip + 16, f.dst_addr);
    put16(ip + 10, fold(sum_range(ip, 20)));

    std::uint8_t* tp = ip + 20;
    const std::uint16_t seg_len = static_cast<std::uint16_t>(f.total_size - 20);
    switch (f.protocol) {
        case IpProto::Tcp: {
            put16(tp, f.src_port);
            put16(tp + 2, f.dst_port);
            put32(tp + 4, f.tcp_seq);
            tp[12] = 5 << 4;  // data offset
            tp[13] = f.tcp_flags;
            put16(tp + 14, 65535);  // window
            std::uint32_t sum = pseudo_sum(f.src_addr, f.dst_addr, 6, seg_len);
            sum += sum_range(tp, seg_len);
            put16(tp + 16, fold(sum));
            break;
        }
        case IpProto::Udp: {
            put16(tp, f.src_port);
            put16(tp + 2, f.dst_port);
            put16(tp + 4, seg_len);
            std::uint32_t sum = pseudo_sum(f.src_addr, f.dst_addr, 17, seg_len);
            sum += sum_range(tp, seg_len);
            std::uint16_t csum = fold(sum);
            if (csum == 0) csum = 0xffff;  // UDP zero means "no checksum"
            put16(tp + 6, csum);
            break;
        }
        case IpProto::Icmp: {
            tp[0] = 8;  // echo request
            put16(tp + 4, f.icmp_id);
            put16(tp + 6, f.icmp_seq);
            put16(tp + 2, fold(sum_range(tp, seg_len)));
            break;
        }
    }
    return pkt;
}

std::string verify_datagram(std::span<const std::uint8_t> bytes) {
    if (bytes.size() < 20) return "datagram shorter than IPv4 header";
    const std::uint8_t* ip = bytes.data();
    if ((ip[0] >> 4) != 4) return "not IPv4";
    const std::size_t ihl = static_cast<std::size_t>(ip[0] & 0x0f) * 4;
    if (ihl < 20 || bytes.size() < ihl) return "bad IHL";
    const std::uint16_t total = get16(ip + 2);
    if (total != bytes.size()) return "IP total length mismatch";
    if (fold(sum_range(ip, ihl)) != 0) return "IP header checksum invalid";

    const std::uint8_t proto = ip[9];
    const std::uint32_t src = (static_cast<std::uint32_t>(ip[12]) << 24) |
                              (static_cast<std::uint32_t>(ip[13]) << 16) |
                              (static_cast<std::uint32_t>(ip[14]) << 8) | ip[15];
    const std::uint32_t dst = (static_cast<std::uint32_t>(ip[16]) << 24) |
                              (static_cast<std::uint32_t>(ip[17]) << 16) |
                              (static_cast<std::uint32_t>(ip[18]) << 8) | ip[19];
    const std::uint8_t* tp = ip + ihl;
    const std::uint16_t seg_len = static_cast<std::uint16_t>(total - ihl);

    if (proto == 6) {
        if (seg_len < 20) return "TCP segment shorter than header";
        std::uint32_t sum = pseudo_sum(src, dst, 6, seg_len);
        sum += sum_range(tp, seg_len);
        if (fold(sum) != 0) return "TCP checksum invalid";
    } else if (proto == 17) {
        if (seg_len < 8) return "UDP segment shorter than header";
        if (get16(tp + 4) != seg_len) return "UDP length mismatch";
        if (get16(tp + 6) != 0) {
            std::uint32_t sum = pseudo_sum(src, dst, 17, seg_len);
            sum += sum_range(tp, seg_len);
            if (fold(sum) != 0) return "UDP checksum invalid";
        }
    } else if (proto == 1) {
        if (seg_len < 8) return "ICMP segment shorter than header";
        if (fold(sum_range(tp, seg_len)) != 0) return "ICMP checksum invalid";
    } else {
        return "unexpected protocol " + std::to_string(proto);
    }
    return {};
}

}  // namespace pulsewave

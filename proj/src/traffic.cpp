#include "pulsewave/traffic.hpp"

#include <algorithm>
#include <cmath>

namespace pulsewave {

std::vector<AttackerProfile> enumerate_attacker_apps(const ScenarioConfig& cfg,
                                                     const Topology& topo) {
    std::vector<int> all_attackers;
    for (const Node& n : topo.nodes) {
        if (n.kind == NodeKind::Client && n.role == Role::Attacker) {
            all_attackers.push_back(n.id);
        }
    }

    std::vector<AttackerProfile> out;
    for (std::size_t vi = 0; vi < cfg.vectors.size(); ++vi) {
        const AttackVector& v = cfg.vectors[vi];
        std::vector<std::pair<int, const AttackerOverride*>> bound;
        if (v.attackers.empty()) {
            for (int id : all_attackers) bound.emplace_back(id, nullptr);
        } else {
            for (const auto& [name, ov] : v.attackers) {
                const int id = topo.node_by_name(name);
                if (id >= 0) bound.emplace_back(id, &ov);
            }
            std::sort(bound.begin(), bound.end());
        }
        for (const auto& [node_id, ov] : bound) {
            AttackerProfile p;
            p.node_id = node_id;
            p.vector_idx = static_cast<int>(vi);
            p.attacker_name = topo.node(node_id).name;
            p.vector_id = v.id;
            p.protocol = v.protocol;
            p.rate_bps = ov && ov->rate_bps ? *ov->rate_bps : v.rate_bps;
            p.jitter = v.jitter;
            p.sizes = ov && ov->sizes ? *ov->sizes : v.sizes;
            p.src_port = v.src_port;
            p.dst_port = v.dst_port;
            out.push_back(std::move(p));
        }
    }
    return out;
}

AttackerApp::AttackerApp(AttackerProfile profile, std::uint64_t global_seed,
                         std::uint32_t src_addr)
    : profile_(std::move(profile)),
      rng_(Rng::derive(global_seed, "attacker", profile_.attacker_name,
                       profile_.vector_id)),
      src_addr_(src_addr) {
    double acc = 0.0;
    for (const auto& e : profile_.sizes.entries) {
        acc += e.weight;
        size_cumulative_.push_back(acc);
    }
}

AttackerApp::Draw AttackerApp::next_send_delay() {
    const double eps = profile_.jitter > 0.0
                           ? rng_.uniform(-profile_.jitter, profile_.jitter)
                           : 0.0;
    const std::uint32_t size =
        profile_.sizes.entries[rng_.weighted_index(size_cumulative_)].size;
    const double delta_s =
        static_cast<double>(size) * 8.0 / (profile_.rate_bps * (1.0 + eps));
    Draw d;
    d.delay = std::max<SimTime>(1, to_ns(delta_s));
    d.size = size;
    return d;
}

Packet AttackerApp::craft(std::uint32_t dst_addr, std::uint32_t size) {
    PacketFields f;
    f.src_addr = src_addr_;
    f.dst_addr = dst_addr;
    f.total_size = size;
    f.ip_id = ip_id_++;

    Protocol proto = profile_.protocol;
    if (proto == Protocol::Mixed) {
        // Per-packet protocol; sizes below the TCP minimum stay UDP/ICMP.
        const std::uint64_t n = size >= 40 ? 3 : 2;
        const std::uint64_t pick = rng_.uniform_int(0, n - 1);
        proto = pick == 0 ? Protocol::Udp
                          : (pick == 1 ? Protocol::Icmp : Protocol::TcpSyn);
    }

    auto pick_port = [&](const PortSpec& spec) -> std::uint16_t {
        if (!spec.random) return spec.value;
        return static_cast<std::uint16_t>(rng_.uniform_int(1024, 65535));
    };

    switch (proto) {
        case Protocol::TcpSyn:
            f.protocol = IpProto::Tcp;
            f.tcp_flags = kTcpFlagSyn;
            f.src_port = pick_port(profile_.src_port);
            f.dst_port = pick_port(profile_.dst_port);
            f.tcp_seq = static_cast<std::uint32_t>(rng_.next_u64());
            break;
        case Protocol::Udp:
            f.protocol = IpProto::Udp;
            f.src_port = pick_port(profile_.src_port);
            f.dst_port = pick_port(profile_.dst_port);
            break;
        case Protocol::Icmp:
            f.protocol = IpProto::Icmp;
            f.icmp_id = static_cast<std::uint16_t>(profile_.node_id);
            f.icmp_seq = icmp_seq_++;
            break;
        case Protocol::Mixed:
            break;  // unreachable
    }

    Packet pkt = craft_packet(f);
    pkt.attacker_node = profile_.node_id;
    pkt.vector_idx = profile_.vector_idx;
    return pkt;
}

BenignClientApp::BenignClientApp(int node_id, std::string name,
                                 std::uint32_t addr, const BenignSpec& spec,
                                 std::uint64_t global_seed,
                                 std::size_t pool_size)
    : node_id_(node_id),
      addr_(addr),
      spec_(spec),
      rng_(Rng::derive(global_seed, "benign-client", name)),
      pool_size_(pool_size) {}

BenignRequestDraw BenignClientApp::next_request() {
    BenignRequestDraw d;
    d.think_delay = std::max<SimTime>(1, to_ns(rng_.exponential(spec_.think_time_mean)));
    d.server_index = static_cast<std::size_t>(rng_.uniform_int(
        0, static_cast<std::uint64_t>(pool_size_) - 1));
    d.src_port = static_cast<std::uint16_t>(rng_.uniform_int(1024, 65535));
    return d;
}

Packet BenignClientApp::craft_request(std::uint32_t server_addr,
                                      std::uint16_t src_port) {
    PacketFields f;
    f.src_addr = addr_;
    f.dst_addr = server_addr;
    f.protocol = IpProto::Tcp;
    f.tcp_flags = kTcpFlagPsh | kTcpFlagAck;
    f.src_port = src_port;
    f.dst_port = 80;
    f.total_size = spec_.request_size;
    f.ip_id = ip_id_++;
    f.tcp_seq = tcp_seq_++;
    return craft_packet(f);
}

BenignServerApp::BenignServerApp(int node_id, std::string name,
                                 std::uint32_t addr, const BenignSpec& spec,
                                 std::uint64_t global_seed)
    : node_id_(node_id),
      addr_(addr),
      spec_(spec),
      rng_(Rng::derive(global_seed, "benign-server", name)) {}

std::uint64_t BenignServerApp::response_count() {
    return rng_.geometric1(spec_.response_packets_mean);
}

Packet BenignServerApp::craft_response(std::uint32_t client_addr,
                                       std::uint16_t client_port) {
    PacketFields f;
    f.src_addr = addr_;
    f.dst_addr = client_addr;
    f.protocol = IpProto::Tcp;
    f.tcp_flags = kTcpFlagPsh | kTcpFlagAck;
    f.src_port = 80;
    f.dst_port = client_port;
    f.total_size = spec_.response_packet_size;
    f.ip_id = ip_id_++;
    f.tcp_seq = tcp_seq_++;
    return craft_packet(f);
}

}  // namespace pulsewave

#ifndef PULSEWAVE_TRAFFIC_HPP
#define PULSEWAVE_TRAFFIC_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "pulsewave/config.hpp"
#include "pulsewave/packet.hpp"
#include "pulsewave/rng.hpp"
#include "pulsewave/time.hpp"
#include "pulsewave/topology.hpp"

namespace pulsewave {

// Attacker applications: one instance per (attacker node, vector), pulsing
// on/off per the timetable with fresh per-packet jitter, plus a lightweight
// benign request/response model.

struct AttackerProfile {
    int node_id = -1;
    int vector_idx = -1;
    std::string attacker_name;
    std::string vector_id;
    Protocol protocol = Protocol::Udp;
    double rate_bps = 0.0;  // r-bar for this attacker (override applied)
    double jitter = 0.0;    // delta
    SizeDistribution sizes;
    PortSpec src_port;
    PortSpec dst_port;
};

// Resolves vector/attacker bindings against the topology: a vector with an
// explicit attacker map binds exactly those nodes, otherwise every
// attacker-role client runs it. Deterministic order: vector, then node id.
std::vector<AttackerProfile> enumerate_attacker_apps(const ScenarioConfig& cfg,
                                                     const Topology& topo);

class AttackerApp {
public:
    AttackerApp(AttackerProfile profile, std::uint64_t global_seed,
                std::uint32_t src_addr);

    struct Draw {
        SimTime delay = 0;       // Delta = S*8 / (r * (1 + eps))
        std::uint32_t size = 0;  // the sampled S for this packet
    };

    // Fresh eps ~ U[-delta, delta] and size per packet.
    Draw next_send_delay();

    // Crafts one attack packet of the given size toward dst. Ports are
    // sampled here when configured random; MIXED draws a per-packet
    // protocol among those the size can carry.
    Packet craft(std::uint32_t dst_addr, std::uint32_t size);

    void on_retarget(int target_idx) { current_target_ = target_idx; }
    int current_target() const { return current_target_; }

    bool on = false;
    std::uint64_t generation = 0;  // invalidates stale send events

    const AttackerProfile& profile() const { return profile_; }

private:
    AttackerProfile profile_;
    Rng rng_;
    std::uint32_t src_addr_ = 0;
    int current_target_ = -1;
    std::vector<double> size_cumulative_;
    std::uint16_t ip_id_ = 0;
    std::uint32_t tcp_seq_ = 0;
    std::uint16_t icmp_seq_ = 0;
};

struct BenignRequestDraw {
    SimTime think_delay = 0;
    std::size_t server_index = 0;  // into the shared server pool
    std::uint16_t src_port = 0;
};

class BenignClientApp {
public:
    BenignClientApp(int node_id, std::string name, std::uint32_t addr,
                    const BenignSpec& spec, std::uint64_t global_seed,
                    std::size_t pool_size);

    BenignRequestDraw next_request();
    Packet craft_request(std::uint32_t server_addr, std::uint16_t src_port);

    int node_id() const { return node_id_; }
    std::uint32_t addr() const { return addr_; }

private:
    int node_id_;
    std::uint32_t addr_;
    BenignSpec spec_;
    Rng rng_;
    std::size_t pool_size_;
    std::uint16_t ip_id_ = 0;
    std::uint32_t tcp_seq_ = 0;
};

class BenignServerApp {
public:
    BenignServerApp(int node_id, std::string name, std::uint32_t addr,
                    const BenignSpec& spec, std::uint64_t global_seed);

    // Number of response packets for one request: G ~ Geometric, mean
    // response_packets_mean, support {1, 2, ...}.
    std::uint64_t response_count();
    Packet craft_response(std::uint32_t client_addr, std::uint16_t client_port);

    int node_id() const { return node_id_; }
    std::uint32_t addr() const { return addr_; }

private:
    int node_id_;
    std::uint32_t addr_;
    BenignSpec spec_;
    Rng rng_;
    std::uint16_t ip_id_ = 0;
    std::uint32_t tcp_seq_ = 0;
};

}  // namespace pulsewave

#endif

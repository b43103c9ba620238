#ifndef PULSEWAVE_TOPOLOGY_HPP
#define PULSEWAVE_TOPOLOGY_HPP

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "pulsewave/config.hpp"
#include "pulsewave/rng.hpp"
#include "pulsewave/time.hpp"

namespace pulsewave {

// Randomized Central Network partial mesh with Autonomous Systems attached
// via gateways, /30 subnets per point-to-point link, and deterministic
// hop-count routes.

enum class NodeKind : std::uint8_t { Cn, Gateway, Client, Server };

struct Node {
    int id = -1;
    std::string name;
    NodeKind kind = NodeKind::Cn;
    Role role = Role::NonTarget;  // meaningful for clients/servers only
    int as_index = -1;            // -1 for CN nodes
};

struct Link {
    int id = -1;
    int node_a = -1;  // endpoints; a < b not guaranteed
    int node_b = -1;
    double rate_bps = 0.0;
    SimTime delay = 0;
    int queue_len = 0;
    std::uint32_t subnet = 0;  // network address of the /30
    bool cn_side = false;      // CN-CN or CN-gateway link

    int other(int node) const { return node == node_a ? node_b : node_a; }
};

struct AddressSpaceExhausted : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct UnreachableDestination : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct RoutingTable {
    // host ordinal -> node id
    std::vector<int> host_nodes;
    // [node id][host ordinal] -> outgoing link id, or -1 when node == host node
    std::vector<std::vector<int>> next_link;
    std::unordered_map<int, int> node_to_host;  // host node id -> ordinal

    int host_ordinal(int node_id) const;
    // Directed link sequence from a node to a destination host node.
    std::vector<int> path(int from_node, int dst_host_node,
                          const std::vector<Link>& links) const;
};

struct Topology {
    std::vector<Node> nodes;
    std::vector<Link> links;
    // interface address per (link, endpoint): [link id][0]=node_a, [1]=node_b
    std::vector<std::array<std::uint32_t, 2>> link_addr;
    RoutingTable routes;

    int cn_count = 0;

    std::uint32_t addr_on_link(int node_id, int link_id) const;
    // A host's (client/server/gateway) address on its uplink; for hosts this
    // is their unique interface address.
    std::uint32_t host_addr(int node_id) const;
    int node_by_name(const std::string& name) const;  // -1 if absent
    int uplink_of(int host_node_id) const;            // host's single link
    const Node& node(int id) const { return nodes[static_cast<std::size_t>(id)]; }

    std::vector<int> host_ids() const;  // clients + servers, ascending
    std::string dump_edges() const;     // "fromName toName rate delay subnet"
};

// Undirected CN graph as an edge list over nodes [0, n).
struct CnGraph {
    int node_count = 0;
    std::vector<std::pair<int, int>> edges;  // a < b
};

// L(n, rho) = (n-1) + round(rho * (n(n-1)/2 - (n-1))), round half up.
std::size_t cn_link_count(int n, double rho);

// Random spanning tree first, then a rho-fraction of the remaining
// candidate links sampled uniformly without replacement.
CnGraph build_central_network(int n, double rho, Rng& rng);

Topology attach_autonomous_systems(const CnGraph& cn, const ScenarioConfig& cfg,
                                   Rng& rng);

// Gives link k the subnet 10.(k/256).(k%256).0/30; lower node id gets .1.
void assign_addresses(Topology& topo);

// Hop-count shortest paths; ties broken by smallest next-hop node id.
RoutingTable compute_routes(const Topology& topo);

// Full pipeline: CN mesh + AS attachment + addresses + routes, seeded from
// cfg.seed.
Topology build_topology(const ScenarioConfig& cfg);

std::string format_ipv4(std::uint32_t addr);

}  // namespace pulsewave

#endif

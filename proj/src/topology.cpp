#include "pulsewave/topology.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <deque>
#include <limits>
#include <numeric>
#include <sstream>

namespace pulsewave {

std::size_t cn_link_count(int n, double rho) {
    const std::size_t nn = static_cast<std::size_t>(n);
    const std::size_t tree = nn - 1;
    const std::size_t all = nn * (nn - 1) / 2;
    const std::size_t extra =
        static_cast<std::size_t>(std::llround(rho * static_cast<double>(all - tree)));
    return tree + extra;
}

CnGraph build_central_network(int n, double rho, Rng& rng) {
    CnGraph g;
    g.node_count = n;
    if (n <= 1) return g;

    // Random recursive tree keeps the graph connected at rho = 0.
    for (int v = 1; v < n; ++v) {
        const int parent = static_cast<int>(
            rng.uniform_int(0, static_cast<std::uint64_t>(v) - 1));
        g.edges.emplace_back(std::min(parent, v), std::max(parent, v));
    }

    std::vector<std::pair<int, int>> candidates;
    for (int a = 0; a < n; ++a) {
        for (int b = a + 1; b < n; ++b) {
            if (std::find(g.edges.begin(), g.edges.end(), std::make_pair(a, b)) ==
                g.edges.end()) {
                candidates.emplace_back(a, b);
            }
        }
    }
    const std::size_t want = cn_link_count(n, rho) - g.edges.size();
    // Partial Fisher-Yates: the first `want` slots are a uniform sample.
    for (std::size_t i = 0; i < want && i < candidates.size(); ++i) {
        const std::size_t j = static_cast<std::size_t>(rng.uniform_int(
            i, static_cast<std::uint64_t>(candidates.size()) - 1));
        std::swap(candidates[i], candidates[j]);
        g.edges.push_back(candidates[i]);
    }
    return g;
}

Topology attach_autonomous_systems(const CnGraph& cn, const ScenarioConfig& cfg,
                                   Rng& rng) {
    Topology topo;
    topo.cn_count = cn.node_count;

    for (int i = 0; i < cn.node_count; ++i) {
        topo.nodes.push_back(
            {i, "CN" + std::to_string(i), NodeKind::Cn, Role::NonTarget, -1});
    }

    auto add_link = [&](int a, int b, double rate, SimTime delay, int queue,
                        bool cn_side) {
        Link l;
        l.id = static_cast<int>(topo.links.size());
        l.node_a = a;
        l.node_b = b;
        l.rate_bps = rate;
        l.delay = delay;
        l.queue_len = queue;
        l.cn_side = cn_side;
        topo.links.push_back(l);
    };

    const CnSpec& cns = cfg.central_network;
    for (const auto& [a, b] : cn.edges) {
        add_link(a, b, cns.link_rate_bps, cns.link_delay, cns.queue_len, true);
    }

    // Round-robin gateway placement over an rng-shuffled CN node order.
    std::vector<int> order(static_cast<std::size_t>(cn.node_count));
    std::iota(order.begin(), order.end(), 0);
    for (std::size_t i = order.size(); i > 1; --i) {
        const std::size_t j =
            static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::uint64_t>(i) - 1));
        std::swap(order[i - 1], order[j]);
    }

    for (std::size_t as_idx = 0; as_idx < cfg.autonomous_systems.size(); ++as_idx) {
        const AsSpec& spec = cfg.autonomous_systems[as_idx];
        const int cn_node = order[as_idx % order.size()];

        const int gw = static_cast<int>(topo.nodes.size());
        topo.nodes.push_back({gw, spec.gateway_name(), NodeKind::Gateway,
                              Role::NonTarget, static_cast<int>(as_idx)});
        add_link(cn_node, gw, cns.link_rate_bps, cns.link_delay, cns.queue_len,
                 true);

        for (int c = 0; c < spec.client_count; ++c) {
            const int id = static_cast<int>(topo.nodes.size());
            topo.nodes.push_back({id, spec.client_name(c), NodeKind::Client,
                                  spec.role_of(c), static_cast<int>(as_idx)});
            add_link(gw, id, spec.link_rate_bps, spec.link_delay, cns.queue_len,
                     false);
        }
        for (int s = 0; s < spec.server_count; ++s) {
            const int id = static_cast<int>(topo.nodes.size());
            topo.nodes.push_back({id, spec.server_name(s), NodeKind::Server,
                                  spec.role_of(spec.client_count + s),
                                  static_cast<int>(as_idx)});
            add_link(gw, id, spec.link_rate_bps, spec.link_delay, cns.queue_len,
                     false);
        }
    }
    return topo;
}

void assign_addresses(Topology& topo) {
    if (topo.links.size() > 65536) {
        throw AddressSpaceExhausted("more than 65536 links (" +
                                    std::to_string(topo.links.size()) + ")");
    }
    topo.link_addr.resize(topo.links.size());
    for (std::size_t k = 0; k < topo.links.size(); ++k) {
        const std::uint32_t subnet = (10u << 24) |
                                     (static_cast<std::uint32_t>(k / 256) << 16) |
                                     (static_cast<std::uint32_t>(k % 256) << 8);
        topo.links[k].subnet = subnet;
        Link& l = topo.links[k];
        const bool a_low = l.node_a < l.node_b;
        topo.link_addr[k][0] = subnet + (a_low ? 1 : 2);
        topo.link_addr[k][1] = subnet + (a_low ? 2 : 1);
    }
}

std::uint32_t Topology::addr_on_link(int node_id, int link_id) const {
    const Link& l = links[static_cast<std::size_t>(link_id)];
    return node_id == l.node_a ? link_addr[static_cast<std::size_t>(link_id)][0]
                               : link_addr[static_cast<std::size_t>(link_id)][1];
}

int Topology::uplink_of(int host_node_id) const {
    for (const Link& l : links) {
        if (l.node_a == host_node_id || l.node_b == host_node_id) {
            const NodeKind k = nodes[static_cast<std::size_t>(host_node_id)].kind;
            if (k == NodeKind::Client || k == NodeKind::Server) return l.id;
        }
    }
    return -1;
}

std::uint32_t Topology::host_addr(int node_id) const {
    const int link = uplink_of(node_id);
    if (link < 0) return 0;
    return addr_on_link(node_id, link);
}

int Topology::node_by_name(const std::string& name) const {
    for (const Node& n : nodes) {
        if (n.name == name) return n.id;
    }
    return -1;
}

std::vector<int> Topology::host_ids() const {
    std::vector<int> out;
    for (const Node& n : nodes) {
        if (n.kind == NodeKind::Client || n.kind == NodeKind::Server) {
            out.push_back(n.id);
        }
    }
    return out;
}

int RoutingTable::host_ordinal(int node_id) const {
    const auto it = node_to_host.find(node_id);
    return it == node_to_host.end() ? -1 : it->second;
}

std::vector<int> RoutingTable::path(int from_node, int dst_host_node,
                                    const std::vector<Link>& links) const {
    std::vector<int> out;
    const int ordinal = host_ordinal(dst_host_node);
    if (ordinal < 0) throw UnreachableDestination("unknown destination host");
    int cur = from_node;
    while (cur != dst_host_node) {
        const int link = next_link[static_cast<std::size_t>(cur)]
                                  [static_cast<std::size_t>(ordinal)];
        if (link < 0) throw UnreachableDestination("no route");
        out.push_back(link);
        cur = links[static_cast<std::size_t>(link)].other(cur);
        if (out.size() > links.size()) {
            throw UnreachableDestination("routing loop");
        }
    }
    return out;
}

RoutingTable compute_routes(const Topology& topo) {
    RoutingTable rt;
    const std::size_t n = topo.nodes.size();

    // Adjacency sorted by neighbor id for the deterministic tie-break.
    std::vector<std::vector<std::pair<int, int>>> adj(n);  // (neighbor, link)
    for (const Link& l : topo.links) {
        adj[static_cast<std::size_t>(l.node_a)].emplace_back(l.node_b, l.id);
        adj[static_cast<std::size_t>(l.node_b)].emplace_back(l.node_a, l.id);
    }
    for (auto& row : adj) std::sort(row.begin(), row.end());

    rt.host_nodes = topo.host_ids();
    for (std::size_t h = 0; h < rt.host_nodes.size(); ++h) {
        rt.node_to_host[rt.host_nodes[h]] = static_cast<int>(h);
    }
    rt.next_link.assign(n, std::vector<int>(rt.host_nodes.size(), -1));

    constexpr int kInf = std::numeric_limits<int>::max();
    std::vector<int> dist(n);
    for (std::size_t h = 0; h < rt.host_nodes.size(); ++h) {
        const int dst = rt.host_nodes[h];
        std::fill(dist.begin(), dist.end(), kInf);
        dist[static_cast<std::size_t>(dst)] = 0;
        std::deque<int> queue{dst};
        while (!queue.empty()) {
            const int u = queue.front();
            queue.pop_front();
            for (const auto& [v, link] : adj[static_cast<std::size_t>(u)]) {
                if (dist[static_cast<std::size_t>(v)] == kInf) {
                    dist[static_cast<std::size_t>(v)] =
                        dist[static_cast<std::size_t>(u)] + 1;
                    queue.push_back(v);
                }
            }
        }
        for (std::size_t u = 0; u < n; ++u) {
            if (static_cast<int>(u) == dst) continue;
            if (dist[u] == kInf) {
                throw UnreachableDestination(
                    "node " + topo.nodes[u].name + " cannot reach " +
                    topo.nodes[static_cast<std::size_t>(dst)].name);
            }
            // Smallest neighbor id among those one hop closer.
            for (const auto& [v, link] : adj[u]) {
                if (dist[static_cast<std::size_t>(v)] == dist[u] - 1) {
                    rt.next_link[u][h] = link;
                    break;
                }
            }
        }
    }
    return rt;
}

Topology build_topology(const ScenarioConfig& cfg) {
    Rng rng = Rng::derive(cfg.seed, "topology");
    CnGraph cn =
        build_central_network(cfg.central_network.node_count,
                              cfg.central_network.redundancy, rng);
    Topology topo = attach_autonomous_systems(cn, cfg, rng);
    assign_addresses(topo);
    topo.routes = compute_routes(topo);
    return topo;
}

std::string format_ipv4(std::uint32_t addr) {
    std::ostringstream out;
    out << ((addr >> 24) & 0xff) << '.' << ((addr >> 16) & 0xff) << '.'
        << ((addr >> 8) & 0xff) << '.' << (addr & 0xff);
    return out.str();
}

std::string Topology::dump_edges() const {
    std::ostringstream out;
    for (const Link& l : links) {
        out << nodes[static_cast<std::size_t>(l.node_a)].name << ' '
            << nodes[static_cast<std::size_t>(l.node_b)].name << ' '
            << l.rate_bps << ' ' << to_seconds(l.delay) << ' '
            << format_ipv4(l.subnet) << "/30\n";
    }
    return out.str();
}

}  // namespace pulsewave

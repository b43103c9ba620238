#include "pulsewave/engine.hpp"

#include <chrono>
#include <cmath>

namespace pulsewave {

namespace {

SimTime serialization_ns(std::uint32_t size_bytes, double rate_bps) {
    return std::max<SimTime>(
        1, static_cast<SimTime>(
               std::llround(static_cast<double>(size_bytes) * 8.0 * 1e9 / rate_bps)));
}

}  // namespace

SimCore::SimCore(const Topology& topo, SimTime duration)
    : topo_(topo), duration_(duration) {
    dirs_.reserve(topo.links.size() * 2);
    for (const Link& l : topo.links) {
        for (int side = 0; side < 2; ++side) {
            LinkDir d;
            d.link_id = l.id;
            d.from_node = side == 0 ? l.node_a : l.node_b;
            d.to_node = side == 0 ? l.node_b : l.node_a;
            d.rate_bps = l.rate_bps;
            d.delay = l.delay;
            d.capacity = static_cast<std::size_t>(l.queue_len);
            dirs_.push_back(std::move(d));
        }
    }
    for (int host : topo.host_ids()) {
        addr_to_node_[topo.host_addr(host)] = host;
    }
}

void SimCore::attach_captures(std::vector<std::unique_ptr<CapturePoint>>& points) {
    for (auto& cp : points) {
        dirs_[static_cast<std::size_t>(dir_index(cp->link_id, cp->from_node))]
            .capture = cp.get();
    }
}

int SimCore::dir_index(int link_id, int from_node) const {
    const Link& l = topo_.links[static_cast<std::size_t>(link_id)];
    return 2 * link_id + (from_node == l.node_a ? 0 : 1);
}

int SimCore::uplink_dir(int host_node) const {
    const int link = topo_.uplink_of(host_node);
    return link < 0 ? -1 : dir_index(link, host_node);
}

void SimCore::schedule(SimTime t, Event ev) {
    ev.t = t;
    ev.seq = next_seq_++;
    queue_.push(std::move(ev));
}

void SimCore::start_transmission(LinkDir& d, const PacketPtr& pkt, SimTime t) {
    // Capture sees the packet when serialization begins on the egress side.
    if (d.capture) {
        d.capture->writer.append(t, static_cast<std::uint16_t>(d.from_node),
                                 static_cast<std::uint16_t>(d.to_node),
                                 pkt->bytes);
    }
    ++d.tx;
    const SimTime ser = serialization_ns(pkt->total_size, d.rate_bps);
    d.busy_until = t + ser;
    Event ev;
    ev.kind = Event::Kind::Deliver;
    ev.a = static_cast<std::int32_t>(&d - dirs_.data());
    ev.pkt = pkt;
    schedule(d.busy_until + d.delay, std::move(ev));
}

void SimCore::transmit(int dir_idx, const PacketPtr& pkt, SimTime t) {
    LinkDir& d = dirs_[static_cast<std::size_t>(dir_idx)];
    if (d.busy_until <= t && d.queue.empty()) {
        start_transmission(d, pkt, t);
        return;
    }
    if (d.queue.size() < d.capacity) {
        d.queue.push_back(pkt);
        if (!d.tx_pending) {
            d.tx_pending = true;
            Event ev;
            ev.kind = Event::Kind::TxComplete;
            ev.a = dir_idx;
            schedule(d.busy_until, std::move(ev));
        }
        return;
    }
    ++d.drop;
}

void SimCore::handle_tx_complete(int dir_idx, SimTime t) {
    LinkDir& d = dirs_[static_cast<std::size_t>(dir_idx)];
    if (d.queue.empty()) {
        d.tx_pending = false;
        return;
    }
    PacketPtr pkt = d.queue.front();
    d.queue.pop_front();
    start_transmission(d, pkt, t);
    if (!d.queue.empty()) {
        Event ev;
        ev.kind = Event::Kind::TxComplete;
        ev.a = dir_idx;
        schedule(d.busy_until, std::move(ev));
    } else {
        d.tx_pending = false;
    }
}

void SimCore::forward(int node, const PacketPtr& pkt, SimTime t) {
    const auto owner = addr_to_node_.find(pkt->dst_addr);
    if (owner != addr_to_node_.end() && owner->second == node) {
        ++delivered;
        if (on_local_delivery) on_local_delivery(node, pkt, t);
        return;
    }
    if (owner == addr_to_node_.end()) {
        throw std::logic_error("forward: no route to " +
                               format_ipv4(pkt->dst_addr) + " (unknown host)");
    }
    const int ordinal = topo_.routes.host_ordinal(owner->second);
    const int link = topo_.routes.next_link[static_cast<std::size_t>(node)]
                                           [static_cast<std::size_t>(ordinal)];
    if (link < 0) {
        throw std::logic_error("forward: no next hop from " +
                               topo_.node(node).name + " to " +
                               format_ipv4(pkt->dst_addr));
    }
    transmit(dir_index(link, node), pkt, t);
}

bool SimCore::next_event(Event& out) {
    while (!queue_.empty()) {
        // priority_queue::top is const; the copy is cheap (one shared_ptr).
        Event ev = queue_.top();
        queue_.pop();
        if (ev.t >= duration_ || ev.kind == Event::Kind::SimEnd) {
            return false;
        }
        now_ = ev.t;
        ++events_executed;
        switch (ev.kind) {
            case Event::Kind::TxComplete:
                handle_tx_complete(ev.a, ev.t);
                break;
            case Event::Kind::Deliver: {
                LinkDir& d = dirs_[static_cast<std::size_t>(ev.a)];
                ++d.rx;
                forward(d.to_node, ev.pkt, ev.t);
                break;
            }
            default:
                out = std::move(ev);
                return true;
        }
    }
    return false;
}

Engine::Engine(ScenarioConfig cfg)
    : cfg_(std::move(cfg)),
      topo_(build_topology(cfg_)),
      timetable_(build_timetable(cfg_.vectors,
                                 static_cast<int>(cfg_.targets.size()),
                                 cfg_.duration)) {}

RunReport Engine::run(const std::string& out_dir) {
    const auto t0 = std::chrono::steady_clock::now();
    RunReport report;

    std::vector<std::unique_ptr<CapturePoint>> captures;
    if (!out_dir.empty()) {
        captures = open_capture_points(topo_, cfg_.capture, out_dir);
    }

    SimCore core(topo_, cfg_.duration);
    core.attach_captures(captures);

    // Attacker applications: one per (attacker node, vector).
    std::vector<AttackerApp> apps;
    std::vector<std::vector<std::int32_t>> apps_of_vector(cfg_.vectors.size());
    for (AttackerProfile& p : enumerate_attacker_apps(cfg_, topo_)) {
        apps_of_vector[static_cast<std::size_t>(p.vector_idx)].push_back(
            static_cast<std::int32_t>(apps.size()));
        const std::uint32_t src = topo_.host_addr(p.node_id);
        apps.emplace_back(std::move(p), cfg_.seed, src);
    }
    std::vector<int> app_uplink(apps.size());
    for (std::size_t i = 0; i < apps.size(); ++i) {
        app_uplink[i] = core.uplink_dir(apps[i].profile().node_id);
    }

    // Target addresses in the configured order.
    std::vector<std::uint32_t> target_addrs;
    for (const std::string& name : cfg_.targets) {
        const int node = topo_.node_by_name(name);
        target_addrs.push_back(topo_.host_addr(node));
    }

    // Benign server pool (non-target servers, plus targets when configured)
    // and per-client request loops.
    std::vector<BenignServerApp> servers;
    std::unordered_map<int, std::size_t> server_by_node;
    std::vector<std::uint32_t> pool_addrs;
    for (const Node& n : topo_.nodes) {
        if (n.kind != NodeKind::Server) continue;
        if (n.role == Role::Target && !cfg_.benign.include_targets) continue;
        server_by_node[n.id] = servers.size();
        servers.emplace_back(n.id, n.name, topo_.host_addr(n.id), cfg_.benign,
                             cfg_.seed);
        pool_addrs.push_back(topo_.host_addr(n.id));
    }
    std::vector<BenignClientApp> clients;
    for (const Node& n : topo_.nodes) {
        if (n.kind == NodeKind::Client && n.role == Role::Benign &&
            !pool_addrs.empty()) {
            clients.emplace_back(n.id, n.name, topo_.host_addr(n.id), cfg_.benign,
                                 cfg_.seed, pool_addrs.size());
        }
    }
    std::vector<int> client_uplink(clients.size());
    for (std::size_t i = 0; i < clients.size(); ++i) {
        client_uplink[i] = core.uplink_dir(clients[i].node_id());
    }

    // Servers respond to benign requests; attack traffic gets no replies.
    core.on_local_delivery = [&](int node, const PacketPtr& pkt, SimTime t) {
        if (pkt->protocol != IpProto::Tcp || pkt->dst_port != 80 ||
            !(pkt->tcp_flags & kTcpFlagPsh)) {
            return;
        }
        const auto it = server_by_node.find(node);
        if (it == server_by_node.end()) return;
        BenignServerApp& srv = servers[it->second];
        const std::uint64_t count = srv.response_count();
        const int dir = core.uplink_dir(node);
        for (std::uint64_t i = 0; i < count; ++i) {
            auto resp = std::make_shared<Packet>(
                srv.craft_response(pkt->src_addr, pkt->src_port));
            ++report.benign_packets;
            core.transmit(dir, std::move(resp), t);
        }
    };

    // Timetable events: retargets and window ends for every cycle.
    for (const RetargetEvent& r : timetable_.retargets) {
        Event ev;
        ev.kind = Event::Kind::Retarget;
        ev.a = r.vector_idx;
        ev.b = r.target_idx;
        core.schedule(r.time, std::move(ev));
        Event end;
        end.kind = Event::Kind::WindowEnd;
        end.a = r.vector_idx;
        const SimTime w_end =
            r.time + cfg_.vectors[static_cast<std::size_t>(r.vector_idx)].burst;
        core.schedule(w_end, std::move(end));
    }

    // First benign request per client.
    for (std::size_t i = 0; i < clients.size(); ++i) {
        const BenignRequestDraw d = clients[i].next_request();
        Event ev;
        ev.kind = Event::Kind::BenignTick;
        ev.a = static_cast<std::int32_t>(i);
        ev.b = static_cast<std::int32_t>(d.server_index);
        ev.size = d.src_port;
        core.schedule(d.think_delay, std::move(ev));
    }

    {
        Event end;
        end.kind = Event::Kind::SimEnd;
        core.schedule(cfg_.duration, std::move(end));
    }

    bool io_failed = false;
    std::string io_message;
    try {
        Event ev;
        while (core.next_event(ev)) {
            switch (ev.kind) {
                case Event::Kind::Retarget: {
                    for (std::int32_t ai :
                         apps_of_vector[static_cast<std::size_t>(ev.a)]) {
                        AttackerApp& app = apps[static_cast<std::size_t>(ai)];
                        app.on_retarget(ev.b);
                        if (!app.on) {
                            app.on = true;
                            ++app.generation;
                            const AttackerApp::Draw d = app.next_send_delay();
                            Event send;
                            send.kind = Event::Kind::AppSend;
                            send.a = ai;
                            send.gen = app.generation;
                            send.size = d.size;
                            core.schedule(ev.t + d.delay, std::move(send));
                        }
                    }
                    break;
                }
                case Event::Kind::WindowEnd: {
                    if (timetable_.active_target(ev.a, ev.t)) break;
                    for (std::int32_t ai :
                         apps_of_vector[static_cast<std::size_t>(ev.a)]) {
                        AttackerApp& app = apps[static_cast<std::size_t>(ai)];
                        app.on = false;
                        ++app.generation;  // invalidate the pending send
                    }
                    break;
                }
                case Event::Kind::AppSend: {
                    AttackerApp& app = apps[static_cast<std::size_t>(ev.a)];
                    if (!app.on || app.generation != ev.gen) break;  // stale
                    const std::uint32_t dst =
                        target_addrs[static_cast<std::size_t>(app.current_target())];
                    auto pkt = std::make_shared<Packet>(app.craft(dst, ev.size));
                    ++report.attack_packets;
                    core.transmit(app_uplink[static_cast<std::size_t>(ev.a)],
                                  std::move(pkt), ev.t);
                    const AttackerApp::Draw d = app.next_send_delay();
                    Event send;
                    send.kind = Event::Kind::AppSend;
                    send.a = ev.a;
                    send.gen = app.generation;
                    send.size = d.size;
                    core.schedule(ev.t + d.delay, std::move(send));
                    break;
                }
                case Event::Kind::BenignTick: {
                    BenignClientApp& client =
                        clients[static_cast<std::size_t>(ev.a)];
                    auto pkt = std::make_shared<Packet>(client.craft_request(
                        pool_addrs[static_cast<std::size_t>(ev.b)],
                        static_cast<std::uint16_t>(ev.size)));
                    ++report.benign_packets;
                    core.transmit(client_uplink[static_cast<std::size_t>(ev.a)],
                                  std::move(pkt), ev.t);
                    const BenignRequestDraw d = client.next_request();
                    Event next;
                    next.kind = Event::Kind::BenignTick;
                    next.a = ev.a;
                    next.b = static_cast<std::int32_t>(d.server_index);
                    next.size = d.src_port;
                    core.schedule(ev.t + d.think_delay, std::move(next));
                    break;
                }
                default:
                    break;
            }
        }
        report.complete = true;
    } catch (const IoError& e) {
        io_failed = true;
        io_message = e.what();
        report.complete = false;
    }

    report.events_executed = core.events_executed;
    report.delivered_packets = core.delivered;
    for (std::size_t i = 0; i < core.dir_count(); ++i) {
        const LinkDir& d = core.dir(static_cast<int>(i));
        LinkDirCounters c;
        c.from = topo_.node(d.from_node).name;
        c.to = topo_.node(d.to_node).name;
        c.tx = d.tx;
        c.rx = d.rx;
        c.drop = d.drop;
        // Queued packets plus any still serializing or propagating.
        c.residual = d.tx - d.rx + d.queue.size();
        report.dropped_packets += d.drop;
        report.links.push_back(std::move(c));
    }
    for (auto& cp : captures) {
        cp->writer.close();
        report.captures.push_back(
            {cp->file_name, cp->writer.packets, cp->writer.bytes});
    }

    const auto t1 = std::chrono::steady_clock::now();
    report.wallclock_ms =
        std::chrono::duration<double, std::milli>(t1 - t0).count();

    if (!out_dir.empty()) {
        write_run_log(out_dir + "/" + cfg_.capture.prefix + "__run.log", cfg_,
                      topo_, timetable_, report);
    }
    if (io_failed) {
        throw IoError(io_message);
    }
    return report;
}

}  // namespace pulsewave

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "pulsewave/engine.hpp"

using namespace pulsewave;
namespace fs = std::filesystem;

namespace {

// Two directly linked hosts; enough to exercise the link mechanics.
Topology two_host_topology(double rate_bps, double delay_s, int queue_len) {
    Topology topo;
    topo.nodes.push_back({0, "A", NodeKind::Client, Role::Benign, -1});
    topo.nodes.push_back({1, "B", NodeKind::Client, Role::Benign, -1});
    Link l;
    l.id = 0;
    l.node_a = 0;
    l.node_b = 1;
    l.rate_bps = rate_bps;
    l.delay = to_ns(delay_s);
    l.queue_len = queue_len;
    topo.links.push_back(l);
    assign_addresses(topo);
    topo.routes = compute_routes(topo);
    return topo;
}

PacketPtr make_packet(const Topology& topo, std::uint32_t size) {
    PacketFields f;
    f.src_addr = topo.host_addr(0);
    f.dst_addr = topo.host_addr(1);
    f.protocol = IpProto::Udp;
    f.src_port = 1234;
    f.dst_port = 80;
    f.total_size = size;
    return std::make_shared<Packet>(craft_packet(f));
}

void pump(SimCore& core) {
    Event ev;
    while (core.next_event(ev)) {
        // Traffic-layer events are not scheduled in these tests.
    }
}

ScenarioConfig attack_config(double duration_s, double rate_bps,
                             std::uint64_t seed) {
    ScenarioConfig cfg;
    cfg.name = "mini";
    cfg.seed = seed;
    cfg.duration = to_ns(duration_s);
    cfg.central_network.node_count = 2;
    AsSpec as1;
    as1.id = "AS1";
    as1.client_count = 2;
    as1.roles = {{0, Role::Attacker}, {1, Role::Attacker}};
    AsSpec as2;
    as2.id = "AS2";
    as2.server_count = 2;
    as2.roles = {{0, Role::Target}, {1, Role::Target}};
    cfg.autonomous_systems = {as1, as2};
    AttackVector v;
    v.id = "V1";
    v.protocol = Protocol::Udp;
    v.sizes = SizeDistribution::single(96);
    v.rate_bps = rate_bps;
    v.jitter = 0.1;
    v.burst = to_ns(1.0);
    v.switch_gap = to_ns(1.0);
    v.dst_port = PortSpec::fixed(53);
    cfg.vectors.push_back(v);
    cfg.targets = {"AS2-S0", "AS2-S1"};
    cfg.capture.prefix = cfg.name;
    return cfg;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& tag) {
        path = fs::temp_directory_path() /
               ("pw_engine_" + tag + "_" + std::to_string(::getpid()));
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

}  // namespace

TEST_CASE("idle link delivers after serialization plus propagation") {
    Topology topo = two_host_topology(1e8, 0.001, 100);
    SimCore core(topo, to_ns(10.0));
    SimTime arrival = -1;
    core.on_local_delivery = [&](int node, const PacketPtr&, SimTime t) {
        CHECK(node == 1);
        arrival = t;
    };
    core.transmit(core.dir_index(0, 0), make_packet(topo, 1500), 0);
    pump(core);
    CHECK(arrival == to_ns(0.00112));  // 1500*8/1e8 + 0.001
    CHECK(core.dir(0).tx == 1);
    CHECK(core.dir(0).rx == 1);
    CHECK(core.delivered == 1);
}

TEST_CASE("back-to-back packets are spaced by one serialization time") {
    Topology topo = two_host_topology(1e8, 0.001, 100);
    SimCore core(topo, to_ns(10.0));
    std::vector<SimTime> arrivals;
    core.on_local_delivery = [&](int, const PacketPtr&, SimTime t) {
        arrivals.push_back(t);
    };
    const int dir = core.dir_index(0, 0);
    core.transmit(dir, make_packet(topo, 1500), 0);
    core.transmit(dir, make_packet(topo, 1500), 0);
    pump(core);
    REQUIRE(arrivals.size() == 2);
    CHECK(arrivals[1] - arrivals[0] == to_ns(0.00012));  // one serialization
}

TEST_CASE("drop-tail: the 101st concurrent packet is dropped") {
    Topology topo = two_host_topology(1e8, 0.001, 100);
    SimCore core(topo, to_ns(60.0));
    const int dir = core.dir_index(0, 0);
    // One serializing + 100 queued fill the interface; one more must drop.
    for (int i = 0; i < 102; ++i) core.transmit(dir, make_packet(topo, 1500), 0);
    CHECK(core.dir(dir).drop == 1);
    pump(core);
    CHECK(core.dir(dir).tx == 101);
    CHECK(core.dir(dir).rx == 101);
    CHECK(core.delivered == 101);
}

TEST_CASE("forward delivers locally at the destination only") {
    Topology topo = two_host_topology(1e8, 0.001, 100);
    SimCore core(topo, to_ns(10.0));
    int delivered_node = -1;
    core.on_local_delivery = [&](int node, const PacketPtr&, SimTime) {
        delivered_node = node;
    };
    const PacketPtr pkt = make_packet(topo, 100);
    core.forward(1, pkt, 0);  // node 1 owns the destination address
    CHECK(delivered_node == 1);
    CHECK(core.delivered == 1);
    // From node 0 the packet must take the link instead.
    core.forward(0, pkt, 0);
    CHECK(core.dir(0).tx == 1);
}

TEST_CASE("attack path crosses both gateways") {
    const ScenarioConfig cfg = attack_config(2.0, 1e6, 3);
    Engine engine(cfg);
    const Topology& topo = engine.topology();
    const int attacker = topo.node_by_name("AS1-C0");
    const int target = topo.node_by_name("AS2-S0");
    REQUIRE(attacker >= 0);
    REQUIRE(target >= 0);
    const auto path = topo.routes.path(attacker, target, topo.links);
    // client -> AS1-GW -> CN -> CN -> AS2-GW -> server: at least four links,
    // both gateways on the way.
    REQUIRE(path.size() >= 4);
    int cur = attacker;
    bool via_gw1 = false, via_gw2 = false;
    for (int link : path) {
        cur = topo.links[static_cast<std::size_t>(link)].other(cur);
        if (topo.node(cur).name == "AS1-GW") via_gw1 = true;
        if (topo.node(cur).name == "AS2-GW") via_gw2 = true;
    }
    CHECK(via_gw1);
    CHECK(via_gw2);
    CHECK(cur == target);
}

TEST_CASE("benign-only scenario produces no attack packets") {
    ScenarioConfig cfg;
    cfg.name = "benign";
    cfg.seed = 5;
    cfg.duration = to_ns(10.0);
    cfg.central_network.node_count = 2;
    AsSpec as1;
    as1.id = "AS1";
    as1.client_count = 2;  // default role benign
    AsSpec as2;
    as2.id = "AS2";
    as2.server_count = 1;  // default role non-target
    cfg.autonomous_systems = {as1, as2};
    cfg.capture.prefix = cfg.name;

    Engine engine(cfg);
    const RunReport report = engine.run("");
    CHECK(report.complete);
    CHECK(report.attack_packets == 0);
    CHECK(report.benign_packets > 0);
    CHECK(report.delivered_packets > 0);
}

TEST_CASE("per-link conservation once the pipeline drains") {
    // C = 2*1 + 1 = 3 s; the horizon at 5 s cuts the second cycle right
    // before its second window, leaving one second to drain in-flight
    // packets. No benign apps.
    const ScenarioConfig cfg = attack_config(5.0, 1e6, 9);
    Engine engine(cfg);
    const RunReport report = engine.run("");
    CHECK(report.complete);
    CHECK(report.attack_packets > 0);
    std::uint64_t tx_total = 0;
    for (const LinkDirCounters& l : report.links) {
        CHECK(l.tx == l.rx + l.residual);
        CHECK(l.residual == 0);
        CHECK(l.drop == 0);
        tx_total += l.tx;
    }
    CHECK(tx_total > 0);
    // Every attack packet is delivered exactly once.
    CHECK(report.delivered_packets == report.attack_packets);
}

TEST_CASE("throughput never exceeds the link rate") {
    // 40 Mbit/s offered into a 10 Mbit/s access link.
    ScenarioConfig cfg = attack_config(3.0, 4e7, 17);
    for (AsSpec& as_spec : cfg.autonomous_systems) as_spec.link_rate_bps = 1e7;
    Engine engine(cfg);
    const RunReport report = engine.run("");
    CHECK(report.dropped_packets > 0);
    for (const LinkDirCounters& l : report.links) {
        if (l.from == "AS1-C0" || l.from == "AS1-C1") {
            // tx counts serialization starts; at saturation the link fits
            // duration * rate / packet_bits transmissions (+1 quantum).
            const double cap = 3.0 * 1e7 / (96 * 8) + 1;
            CHECK(static_cast<double>(l.tx) <= cap);
        }
    }
}

TEST_CASE("identical config and seed give byte-identical pcaps") {
    const ScenarioConfig cfg = attack_config(3.0, 2e6, 21);
    TempDir dir_a("a"), dir_b("b"), dir_c("c");
    {
        Engine engine(cfg);
        engine.run(dir_a.path.string());
    }
    {
        Engine engine(cfg);
        engine.run(dir_b.path.string());
    }
    std::size_t compared = 0;
    for (const auto& entry : fs::directory_iterator(dir_a.path)) {
        if (entry.path().extension() != ".pcap") continue;
        const std::string a = slurp(entry.path());
        const std::string b = slurp(dir_b.path / entry.path().filename());
        CHECK(a == b);
        CHECK(!a.empty());
        ++compared;
    }
    CHECK(compared > 0);

    // A different seed produces different captures.
    ScenarioConfig other = cfg;
    other.seed = 22;
    {
        Engine engine(other);
        engine.run(dir_c.path.string());
    }
    bool any_diff = false;
    for (const auto& entry : fs::directory_iterator(dir_a.path)) {
        if (entry.path().extension() != ".pcap") continue;
        any_diff |= slurp(entry.path()) != slurp(dir_c.path / entry.path().filename());
    }
    CHECK(any_diff);
}

TEST_CASE("benign request counts sit in the Poisson band") {
    ScenarioConfig cfg;
    cfg.name = "poisson";
    cfg.seed = 41;
    cfg.duration = to_ns(100.0);
    cfg.central_network.node_count = 2;
    AsSpec as1;
    as1.id = "AS1";
    as1.client_count = 4;  // default benign
    AsSpec as2;
    as2.id = "AS2";
    as2.server_count = 2;  // default non-target
    cfg.autonomous_systems = {as1, as2};
    cfg.capture.prefix = cfg.name;

    TempDir dir("poisson");
    Engine engine(cfg);
    const RunReport report = engine.run(dir.path.string());
    REQUIRE(report.complete);

    // Count requests per client at the AS1 gateway egress: TCP PSH to :80.
    fs::path file;
    for (const auto& entry : fs::directory_iterator(dir.path)) {
        const std::string name = entry.path().filename().string();
        if (name.rfind("poisson__AS1-GW-to-", 0) == 0) file = entry.path();
    }
    REQUIRE(fs::exists(file));
    std::map<std::uint32_t, int> requests;
    std::ifstream in(file, std::ios::binary);
    in.seekg(24);
    while (true) {
        std::uint32_t rec[4];
        in.read(reinterpret_cast<char*>(rec), sizeof rec);
        if (!in) break;
        std::vector<std::uint8_t> frame(rec[2]);
        in.read(reinterpret_cast<char*>(frame.data()),
                static_cast<std::streamsize>(frame.size()));
        if (!in) break;
        if (frame.size() < 14 + 40) continue;
        const std::uint8_t* ip = frame.data() + 14;
        if (ip[9] != 6) continue;
        const std::uint16_t dport =
            static_cast<std::uint16_t>((ip[22] << 8) | ip[23]);
        if (dport != 80) continue;
        const std::uint32_t src = (static_cast<std::uint32_t>(ip[12]) << 24) |
                                  (static_cast<std::uint32_t>(ip[13]) << 16) |
                                  (static_cast<std::uint32_t>(ip[14]) << 8) |
                                  ip[15];
        ++requests[src];
    }
    REQUIRE(requests.size() == 4);
    for (const auto& [src, count] : requests) {
        // Open-loop Exp(1 s) thinking over 100 s: 100 +- 3 sigma = 30.
        INFO("client " << format_ipv4(src) << ": " << count << " requests");
        CHECK(count >= 70);
        CHECK(count <= 130);
    }
}

TEST_CASE("no attack packets outside ON windows") {
    const ScenarioConfig cfg = attack_config(6.0, 1e6, 31);
    Engine engine(cfg);
    TempDir dir("win");
    engine.run(dir.path.string());
    const Timetable& tt = engine.timetable();

    // The attacker-side egress capture sees packets right at emission, so
    // every record timestamp must fall into the sending vector's ON span
    // (plus the 0.2 ms access-link delay budget). The CN node AS1-GW
    // attaches to depends on the seed; find the file by pattern.
    fs::path file;
    for (const auto& entry : fs::directory_iterator(dir.path)) {
        const std::string name = entry.path().filename().string();
        if (name.rfind("mini__AS1-GW-to-", 0) == 0) file = entry.path();
    }
    REQUIRE(fs::exists(file));
    std::ifstream in(file, std::ios::binary);
    in.seekg(24);
    std::uint64_t checked = 0;
    while (true) {
        std::uint32_t rec[4];
        in.read(reinterpret_cast<char*>(rec), sizeof rec);
        if (!in) break;
        std::vector<char> frame(rec[2]);
        in.read(frame.data(), static_cast<std::streamsize>(frame.size()));
        if (!in) break;
        // Benign traffic is absent here (no benign clients configured).
        const SimTime t = static_cast<SimTime>(rec[0]) * kNsPerSec +
                          static_cast<SimTime>(rec[1]) * 1000;
        const bool on_now = tt.active_target(0, t).has_value();
        const bool on_recently =
            tt.active_target(0, std::max<SimTime>(0, t - to_ns(0.002)))
                .has_value();
        REQUIRE((on_now || on_recently));
        ++checked;
    }
    CHECK(checked > 0);
}

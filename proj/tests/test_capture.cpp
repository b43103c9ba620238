#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <unistd.h>

#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "pulsewave/capture.hpp"
#include "pulsewave/engine.hpp"
#include "pulsewave/packet.hpp"

using namespace pulsewave;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& tag) {
        path = fs::temp_directory_path() /
               ("pw_capture_" + tag + "_" + std::to_string(::getpid()));
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

std::vector<std::uint8_t> slurp_bytes(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    const std::string s = buf.str();
    return {s.begin(), s.end()};
}

std::vector<std::uint8_t> sample_datagram(std::uint32_t size) {
    PacketFields f;
    f.src_addr = 0x0a000001;
    f.dst_addr = 0x0a000002;
    f.protocol = IpProto::Udp;
    f.src_port = 1;
    f.dst_port = 2;
    f.total_size = size;
    return craft_packet(f).bytes;
}

}  // namespace

TEST_CASE("capture filename pattern is exact") {
    CHECK(capture_filename("DIST", "CN3", "CN5", "cap") ==
          "DIST__CN3-to-CN5__cap.pcap");
    CHECK(capture_filename("VAR1", "AS2-GW", "CN0", "cap") ==
          "VAR1__AS2-GW-to-CN0__cap.pcap");
    CHECK_THROWS_AS(capture_filename("X", "a__b", "CN0", "cap"), InvalidToken);
    CHECK_THROWS_AS(capture_filename("X", "a b", "CN0", "cap"), InvalidToken);
    CHECK_THROWS_AS(capture_filename("X", "", "CN0", "cap"), InvalidToken);
    CHECK_THROWS_AS(capture_filename("pre__fix", "CN0", "CN1", "cap"),
                    InvalidToken);
    CHECK_THROWS_AS(capture_filename("p/x", "CN0", "CN1", "cap"), InvalidToken);
}

TEST_CASE("empty capture file is exactly the 24-byte global header") {
    TempDir dir("empty");
    const fs::path file = dir.path / "empty.pcap";
    {
        PcapWriter writer;
        writer.open(file.string());
        writer.close();
    }
    const auto bytes = slurp_bytes(file);
    REQUIRE(bytes.size() == 24);
    // Little-endian magic 0xa1b2c3d4.
    CHECK(bytes[0] == 0xd4);
    CHECK(bytes[1] == 0xc3);
    CHECK(bytes[2] == 0xb2);
    CHECK(bytes[3] == 0xa1);
    CHECK(bytes[4] == 2);   // version 2.4
    CHECK(bytes[6] == 4);
    CHECK(bytes[20] == 1);  // linktype Ethernet
}

TEST_CASE("record timestamps round half-up to microseconds") {
    TempDir dir("round");
    const fs::path file = dir.path / "round.pcap";
    {
        PcapWriter writer;
        writer.open(file.string());
        writer.append(to_ns(1.5000005), 3, 4, sample_datagram(42));
        writer.append(to_ns(1.9999995), 3, 4, sample_datagram(42));
        writer.close();
    }
    const auto bytes = slurp_bytes(file);
    REQUIRE(bytes.size() == 24 + 2 * (16 + 56));
    std::uint32_t rec[4];
    std::memcpy(rec, bytes.data() + 24, sizeof rec);
    CHECK(rec[0] == 1);
    CHECK(rec[1] == 500001);  // half-up
    CHECK(rec[2] == 56);      // 14 B Ethernet + 42 B IP
    CHECK(rec[3] == 56);
    std::memcpy(rec, bytes.data() + 24 + 16 + 56, sizeof rec);
    CHECK(rec[0] == 2);  // microsecond carry
    CHECK(rec[1] == 0);
}

TEST_CASE("frames carry the synthetic Ethernet header") {
    TempDir dir("eth");
    const fs::path file = dir.path / "eth.pcap";
    {
        PcapWriter writer;
        writer.open(file.string());
        writer.append(0, 0x0102, 0x0304, sample_datagram(42));
        writer.close();
    }
    const auto bytes = slurp_bytes(file);
    const std::uint8_t* eth = bytes.data() + 24 + 16;
    // Destination MAC 02:00:00:00:03:04, source 02:00:00:00:01:02.
    const std::uint8_t want_dst[6] = {0x02, 0, 0, 0, 0x03, 0x04};
    const std::uint8_t want_src[6] = {0x02, 0, 0, 0, 0x01, 0x02};
    CHECK(std::memcmp(eth, want_dst, 6) == 0);
    CHECK(std::memcmp(eth + 6, want_src, 6) == 0);
    CHECK(eth[12] == 0x08);
    CHECK(eth[13] == 0x00);
}

TEST_CASE("capture points cover every directed CN-side link") {
    ScenarioConfig cfg;
    cfg.name = "cover";
    cfg.seed = 1;
    cfg.duration = to_ns(1.0);
    cfg.central_network.node_count = 3;
    cfg.central_network.redundancy = 0.0;
    AsSpec as1;
    as1.id = "AS1";
    as1.client_count = 1;
    cfg.autonomous_systems = {as1};
    cfg.capture.prefix = "cover";

    const Topology topo = build_topology(cfg);
    // 2 CN links + 1 gateway link captured; the client star link is not.
    TempDir dir("points");
    {
        auto points = open_capture_points(topo, cfg.capture, dir.path.string());
        CHECK(points.size() == 6);
        for (auto& p : points) p->writer.close();
    }
    CaptureSpec one_way = cfg.capture;
    one_way.bidirectional = false;
    {
        auto points = open_capture_points(topo, one_way, dir.path.string());
        CHECK(points.size() == 3);
        for (auto& p : points) p->writer.close();
    }
    CaptureSpec with_as = cfg.capture;
    with_as.as_links = true;
    {
        auto points = open_capture_points(topo, with_as, dir.path.string());
        CHECK(points.size() == 8);  // + both directions of the star link
        for (auto& p : points) p->writer.close();
    }
}

TEST_CASE("run log records the reproduction trail") {
    ScenarioConfig cfg;
    cfg.name = "log";
    cfg.seed = 77;
    cfg.duration = to_ns(2.0);
    cfg.central_network.node_count = 2;
    AsSpec as1;
    as1.id = "AS1";
    as1.client_count = 1;
    as1.roles = {{0, Role::Attacker}};
    AsSpec as2;
    as2.id = "AS2";
    as2.server_count = 1;
    as2.roles = {{0, Role::Target}};
    cfg.autonomous_systems = {as1, as2};
    AttackVector v;
    v.id = "V1";
    v.protocol = Protocol::Udp;
    v.sizes = SizeDistribution::single(96);
    v.rate_bps = 1e6;
    v.burst = to_ns(0.5);
    v.switch_gap = to_ns(0.5);
    cfg.vectors.push_back(v);
    cfg.targets = {"AS2-S0"};
    cfg.capture.prefix = "log";

    TempDir dir("runlog");
    Engine engine(cfg);
    engine.run(dir.path.string());

    std::ifstream in(dir.path / "log__run.log");
    REQUIRE(in.is_open());
    std::ostringstream buf;
    buf << in.rdbuf();
    const std::string log = buf.str();

    CHECK(log.find("seed: 77") != std::string::npos);
    CHECK(log.find("status: complete") != std::string::npos);
    CHECK(log.find("[config]") != std::string::npos);
    CHECK(log.find("[topology]") != std::string::npos);
    CHECK(log.find("[timetable]") != std::string::npos);
    // The timetable section matches the schedule formatter exactly.
    const std::string table =
        engine.timetable().format(cfg.vectors, cfg.targets);
    CHECK(log.find(table) != std::string::npos);
    CHECK(log.find("log__CN0-to-CN1__cap.pcap") != std::string::npos);

    SUBCASE("partial runs are flagged") {
        RunReport aborted;
        aborted.complete = false;
        write_run_log((dir.path / "partial.log").string(), cfg,
                      engine.topology(), engine.timetable(), aborted);
        std::ifstream pin(dir.path / "partial.log");
        std::ostringstream pbuf;
        pbuf << pin.rdbuf();
        CHECK(pbuf.str().find("status: partial") != std::string::npos);
        CHECK(pbuf.str().find("partial") != std::string::npos);
    }
}

TEST_CASE("capture timestamps are non-decreasing within a file") {
    ScenarioConfig cfg;
    cfg.name = "mono";
    cfg.seed = 3;
    cfg.duration = to_ns(3.0);
    cfg.central_network.node_count = 2;
    AsSpec as1;
    as1.id = "AS1";
    as1.client_count = 2;
    as1.roles = {{0, Role::Attacker}, {1, Role::Benign}};
    AsSpec as2;
    as2.id = "AS2";
    as2.server_count = 2;
    as2.roles = {{0, Role::Target}, {1, Role::NonTarget}};
    cfg.autonomous_systems = {as1, as2};
    AttackVector v;
    v.id = "V1";
    v.protocol = Protocol::TcpSyn;
    v.sizes = SizeDistribution::single(64);
    v.rate_bps = 2e6;
    v.burst = to_ns(0.5);
    v.switch_gap = to_ns(0.25);
    cfg.vectors.push_back(v);
    cfg.targets = {"AS2-S0"};
    cfg.capture.prefix = "mono";

    TempDir dir("mono");
    Engine engine(cfg);
    const RunReport report = engine.run(dir.path.string());
    REQUIRE(report.complete);

    std::size_t files = 0;
    for (const auto& entry : fs::directory_iterator(dir.path)) {
        if (entry.path().extension() != ".pcap") continue;
        ++files;
        std::ifstream in(entry.path(), std::ios::binary);
        in.seekg(24);
        std::int64_t last = -1;
        while (true) {
            std::uint32_t rec[4];
            in.read(reinterpret_cast<char*>(rec), sizeof rec);
            if (!in) break;
            in.seekg(rec[2], std::ios::cur);
            const std::int64_t ts =
                static_cast<std::int64_t>(rec[0]) * 1000000 + rec[1];
            REQUIRE(ts >= last);
            last = ts;
        }
    }
    CHECK(files == 6);
}

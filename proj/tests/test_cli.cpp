#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "pulsewave/cli.hpp"
#include "pulsewave/schedule.hpp"

using namespace pulsewave;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& tag) {
        path = fs::temp_directory_path() /
               ("pw_cli_" + tag + "_" + std::to_string(::getpid()));
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

std::string preset(const char* name) {
    return std::string(PRESETS_DIR) + "/" + name;
}

std::string file_bytes(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

// A short scenario so CLI round trips stay fast.
const char* kQuick = R"(
name: quick
seed: 3
duration: 3
central_network: {nodes: 2}
autonomous_systems:
  - id: AS1
    clients: 2
    roles: {0: attacker, 1: attacker}
  - id: AS2
    servers: 1
    roles: {0: target}
attack:
  vectors:
    - id: V1
      protocol: udp
      size: 96
      rate: 1000000
      burst: 0.5
      switch: 0.5
      dst_port: 53
  targets: [AS2-S0]
)";

}  // namespace

TEST_CASE("validate exits 0 on presets and 1 on broken input") {
    std::ostringstream out, err;
    CliInvocation inv;
    inv.command = CliInvocation::Command::Validate;
    inv.config_path = preset("dist.yaml");
    CHECK(dispatch(inv, out, err) == 0);

    TempDir dir("validate");
    const fs::path bad = dir.path / "bad.yaml";
    std::ofstream(bad) << "name: x\nduration: -1\ncentral_network: {nodes: 2}\n";
    inv.config_path = bad.string();
    std::ostringstream out2, err2;
    CHECK(dispatch(inv, out2, err2) == 1);
    CHECK(err2.str().find("duration") != std::string::npos);

    inv.config_path = (dir.path / "missing.yaml").string();
    std::ostringstream out3, err3;
    CHECK(dispatch(inv, out3, err3) == 1);
}

TEST_CASE("schedule prints a C that matches the cycle-length formula") {
    std::ostringstream out, err;
    CliInvocation inv;
    inv.command = CliInvocation::Command::Schedule;
    inv.config_path = preset("var1.yaml");
    REQUIRE(dispatch(inv, out, err) == 0);
    const std::string table = out.str();

    const ScenarioConfig cfg = load_config_file(inv.config_path);
    const SimTime c = compute_cycle_length(
        cfg.vectors, static_cast<int>(cfg.targets.size()));
    char expect[64];
    std::snprintf(expect, sizeof expect, "C = %.6f s", to_seconds(c));
    CHECK(table.find(expect) != std::string::npos);
    // One row per window of the first cycle.
    std::size_t rows = 0, pos = 0;
    while ((pos = table.find('\n', pos)) != std::string::npos) {
        ++rows;
        ++pos;
    }
    CHECK(rows == 1 + cfg.vectors.size() * cfg.targets.size() + 1);
}

TEST_CASE("run honors --force and refuses silent overwrite") {
    TempDir dir("force");
    const fs::path cfg_file = dir.path / "quick.yaml";
    std::ofstream(cfg_file) << kQuick;

    CliInvocation inv;
    inv.command = CliInvocation::Command::Run;
    inv.config_path = cfg_file.string();
    inv.out_dir = (dir.path / "out").string();

    std::ostringstream out, err;
    REQUIRE(dispatch(inv, out, err) == 0);
    REQUIRE(fs::exists(dir.path / "out" / "quick__run.log"));

    // Second run into the same non-empty directory must refuse.
    std::ostringstream out2, err2;
    CHECK(dispatch(inv, out2, err2) == 2);
    CHECK(err2.str().find("--force") != std::string::npos);

    inv.force = true;
    std::ostringstream out3, err3;
    CHECK(dispatch(inv, out3, err3) == 0);
}

TEST_CASE("run with a fixed seed is reproducible byte for byte") {
    TempDir dir("repro");
    const fs::path cfg_file = dir.path / "quick.yaml";
    std::ofstream(cfg_file) << kQuick;

    CliInvocation inv;
    inv.command = CliInvocation::Command::Run;
    inv.config_path = cfg_file.string();
    inv.seed_override = 7;

    inv.out_dir = (dir.path / "a").string();
    std::ostringstream out, err;
    REQUIRE(dispatch(inv, out, err) == 0);
    inv.out_dir = (dir.path / "b").string();
    std::ostringstream out2, err2;
    REQUIRE(dispatch(inv, out2, err2) == 0);

    std::size_t compared = 0;
    for (const auto& entry : fs::directory_iterator(dir.path / "a")) {
        if (entry.path().extension() != ".pcap") continue;
        CHECK(file_bytes(entry.path()) ==
              file_bytes(dir.path / "b" / entry.path().filename()));
        ++compared;
    }
    CHECK(compared > 0);
}

TEST_CASE("analyze writes exports and reports composition") {
    TempDir dir("analyze");
    const fs::path cfg_file = dir.path / "quick.yaml";
    std::ofstream(cfg_file) << kQuick;

    CliInvocation run;
    run.command = CliInvocation::Command::Run;
    run.config_path = cfg_file.string();
    run.out_dir = (dir.path / "out").string();
    std::ostringstream rout, rerr;
    REQUIRE(dispatch(run, rout, rerr) == 0);

    CliInvocation an;
    an.command = CliInvocation::Command::Analyze;
    an.inputs = {(dir.path / "out" / "quick__CN0-to-CN1__cap.pcap").string()};
    an.config_path = cfg_file.string();
    an.out_dir = (dir.path / "an").string();
    an.format = "both";
    std::ostringstream aout, aerr;
    REQUIRE(dispatch(an, aout, aerr) == 0);

    CHECK(fs::exists(dir.path / "an" / "quick__CN0-to-CN1__cap.csv"));
    CHECK(fs::exists(dir.path / "an" / "quick__CN0-to-CN1__cap.svg"));
    CHECK(aout.str().find("V1") != std::string::npos);

    SUBCASE("empty input list is a usage error") {
        CliInvocation bad;
        bad.command = CliInvocation::Command::Analyze;
        std::ostringstream o, e;
        CHECK(dispatch(bad, o, e) == 2);
    }
    SUBCASE("malformed pcap input is an analysis finding") {
        const fs::path junk = dir.path / "junk.pcap";
        std::ofstream(junk, std::ios::binary) << "not a pcap";
        CliInvocation bad;
        bad.command = CliInvocation::Command::Analyze;
        bad.inputs = {junk.string()};
        bad.out_dir = (dir.path / "an2").string();
        std::ostringstream o, e;
        CHECK(dispatch(bad, o, e) == 1);
        CHECK(e.str().find("malformed pcap") != std::string::npos);
    }
}

TEST_CASE("run without an output directory is a usage error") {
    CliInvocation inv;
    inv.command = CliInvocation::Command::Run;
    inv.config_path = preset("var1.yaml");
    std::ostringstream out, err;
    CHECK(dispatch(inv, out, err) == 2);
}

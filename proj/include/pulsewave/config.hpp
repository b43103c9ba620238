#ifndef PULSEWAVE_CONFIG_HPP
#define PULSEWAVE_CONFIG_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "pulsewave/time.hpp"

namespace pulsewave {

// Scenario configuration: parsed from YAML, default-filled and validated.
// One scenario per file; unknown keys are hard errors.

enum class Protocol : std::uint8_t { TcpSyn, Udp, Icmp, Mixed };
enum class Role : std::uint8_t { Attacker, Benign, Target, NonTarget };

const char* protocol_name(Protocol p);
const char* role_name(Role r);

// Port selector: a fixed 16-bit value or fresh random per packet.
struct PortSpec {
    bool random = true;
    std::uint16_t value = 0;

    static PortSpec fixed(std::uint16_t v) { return PortSpec{false, v}; }
    static PortSpec rnd() { return PortSpec{true, 0}; }
    bool operator==(const PortSpec&) const = default;
};

struct SizeDistribution {
    struct Entry {
        std::uint32_t size = 0;  // bytes, IP datagram length
        double weight = 0.0;
        bool operator==(const Entry&) const = default;
    };
    std::vector<Entry> entries;

    static SizeDistribution single(std::uint32_t size) {
        return SizeDistribution{{{size, 1.0}}};
    }
    double mean_size() const;
    bool operator==(const SizeDistribution&) const = default;
};

// Per-attacker override of a vector's rate and/or sizes.
struct AttackerOverride {
    std::optional<double> rate_bps;
    std::optional<SizeDistribution> sizes;
    bool operator==(const AttackerOverride&) const = default;
};

struct AttackVector {
    std::string id;
    Protocol protocol = Protocol::Udp;
    SizeDistribution sizes;
    double rate_bps = 0.0;   // nominal per-attacker rate
    double jitter = 0.1;     // delta, in [0, 1)
    SimTime burst = 0;       // b_v
    SimTime switch_gap = 0;  // s_v
    PortSpec src_port = PortSpec::rnd();
    PortSpec dst_port = PortSpec::rnd();
    std::optional<SimTime> offset;  // override of the auto-computed o_v
    // Empty map: every attacker-role node runs this vector.
    std::map<std::string, AttackerOverride> attackers;
    bool operator==(const AttackVector&) const = default;
};

struct CnSpec {
    int node_count = 1;
    double redundancy = 0.0;  // rho in [0, 1]
    double link_rate_bps = 1e9;
    SimTime link_delay = to_ns(0.001);
    int queue_len = 100;
    bool operator==(const CnSpec&) const = default;
};

struct AsSpec {
    std::string id;
    int client_count = 0;
    int server_count = 0;
    // Node index -> role. Indices [0, clients) are clients,
    // [clients, clients+servers) are servers.
    std::map<int, Role> roles;
    double link_rate_bps = 1e8;
    SimTime link_delay = to_ns(0.0002);
    bool operator==(const AsSpec&) const = default;

    Role role_of(int index) const;
    std::string client_name(int i) const;
    std::string server_name(int i) const;
    std::string gateway_name() const;
};

struct BenignSpec {
    std::uint32_t request_size = 400;
    double response_packets_mean = 10.0;
    std::uint32_t response_packet_size = 1500;
    double think_time_mean = 1.0;  // seconds, exponential
    bool include_targets = true;   // whether clients also contact targets
    bool operator==(const BenignSpec&) const = default;
};

struct CaptureSpec {
    std::string prefix;  // defaults to scenario name
    std::string suffix = "cap";
    bool bidirectional = true;
    bool as_links = false;  // also capture AS-internal links
    bool operator==(const CaptureSpec&) const = default;
};

struct ScenarioConfig {
    std::string name;
    std::uint64_t seed = 0;
    SimTime duration = 0;
    CnSpec central_network;
    std::vector<AsSpec> autonomous_systems;
    std::vector<AttackVector> vectors;
    std::vector<std::string> targets;  // ordered: the set T
    BenignSpec benign;
    CaptureSpec capture;
    bool operator==(const ScenarioConfig&) const = default;
};

struct ParseError : std::runtime_error {
    int line;  // 0-based line from the YAML mark, -1 if unknown
    std::string key;
    std::string reason;
    ParseError(int line_, std::string key_, std::string reason_);
};

struct Finding {
    enum class Severity { Error, Warning };
    Severity severity = Severity::Error;
    std::string path;  // config path, e.g. "attack.vectors[2].jitter"
    std::string message;
};

struct ValidationReport {
    std::vector<Finding> findings;
    bool ok() const;
    std::size_t error_count() const;
    std::string to_string() const;
};

struct ValidationError : std::runtime_error {
    ValidationReport report;
    explicit ValidationError(ValidationReport r);
};

// Parses and default-fills a YAML document, then validates it.
// Throws ParseError for structural problems (malformed YAML, unknown
// keys, type mismatches) and ValidationError for semantic violations.
ScenarioConfig parse_config(const std::string& text);
ScenarioConfig load_config_file(const std::string& path);

// Semantic checks only; parse_config calls this internally.
ValidationReport validate(const ScenarioConfig& cfg);

// Canonical YAML form; parse_config(serialize_config(cfg)) == cfg.
std::string serialize_config(const ScenarioConfig& cfg);

}  // namespace pulsewave

#endif

#include "pulsewave/config.hpp"

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

namespace pulsewave {

namespace {

int mark_line(const YAML::Node& n) {
    return n.Mark().is_null() ? -1 : n.Mark().line + 1;
}

[[noreturn]] void fail(const YAML::Node& n, const std::string& key,
                       const std::string& reason) {
    throw ParseError(mark_line(n), key, reason);
}

void check_keys(const YAML::Node& node, const std::string& context,
                std::initializer_list<const char*> allowed) {
    if (!node.IsMap()) return;
    for (const auto& it : node) {
        const std::string key = it.first.as<std::string>();
        if (std::find_if(allowed.begin(), allowed.end(), [&](const char* a) {
                return key == a;
            }) == allowed.end()) {
            fail(it.first, context.empty() ? key : context + "." + key,
                 "unknown key");
        }
    }
}

const YAML::Node require(const YAML::Node& map, const std::string& context,
                         const char* key) {
    const YAML::Node n = map[key];
    if (!n.IsDefined() || n.IsNull()) {
        fail(map, context.empty() ? key : context + "." + std::string(key),
             "missing required key");
    }
    return n;
}

template <typename T>
T as(const YAML::Node& n, const std::string& path, const char* type_name) {
    if (!n.IsScalar()) fail(n, path, std::string("expected ") + type_name);
    try {
        return n.as<T>();
    } catch (const YAML::Exception&) {
        fail(n, path, std::string("expected ") + type_name);
    }
}

double as_double(const YAML::Node& n, const std::string& path) {
    return as<double>(n, path, "number");
}
int as_int(const YAML::Node& n, const std::string& path) {
    return as<int>(n, path, "integer");
}
std::uint64_t as_u64(const YAML::Node& n, const std::string& path) {
    return as<std::uint64_t>(n, path, "unsigned integer");
}
bool as_bool(const YAML::Node& n, const std::string& path) {
    return as<bool>(n, path, "boolean");
}
std::string as_str(const YAML::Node& n, const std::string& path) {
    return as<std::string>(n, path, "string");
}

PortSpec parse_port(const YAML::Node& n, const std::string& path) {
    if (n.IsScalar()) {
        const std::string raw = n.as<std::string>();
        if (raw == "random") return PortSpec::rnd();
        try {
            const int v = n.as<int>();
            if (v < 0 || v > 65535) fail(n, path, "port out of range [0, 65535]");
            return PortSpec::fixed(static_cast<std::uint16_t>(v));
        } catch (const YAML::Exception&) {
        }
    }
    fail(n, path, "expected port number or 'random'");
}

SizeDistribution parse_sizes(const YAML::Node& n, const std::string& path) {
    SizeDistribution dist;
    if (!n.IsMap()) fail(n, path, "expected map of size -> weight");
    for (const auto& it : n) {
        SizeDistribution::Entry e;
        e.size = static_cast<std::uint32_t>(as_int(it.first, path + ".size"));
        e.weight = as_double(it.second, path + ".weight");
        dist.entries.push_back(e);
    }
    std::sort(dist.entries.begin(), dist.entries.end(),
              [](const auto& a, const auto& b) { return a.size < b.size; });
    return dist;
}

Role parse_role(const YAML::Node& n, const std::string& path) {
    const std::string s = as_str(n, path);
    if (s == "attacker") return Role::Attacker;
    if (s == "benign") return Role::Benign;
    if (s == "target") return Role::Target;
    if (s == "non-target") return Role::NonTarget;
    fail(n, path, "unknown role '" + s +
                      "' (expected attacker|benign|target|non-target)");
}

Protocol parse_protocol(const YAML::Node& n, const std::string& path) {
    const std::string s = as_str(n, path);
    if (s == "tcp_syn") return Protocol::TcpSyn;
    if (s == "udp") return Protocol::Udp;
    if (s == "icmp") return Protocol::Icmp;
    if (s == "mixed") return Protocol::Mixed;
    fail(n, path, "unknown protocol '" + s + "' (expected tcp_syn|udp|icmp|mixed)");
}

AttackVector parse_vector(const YAML::Node& n, const std::string& path) {
    check_keys(n, path,
               {"id", "protocol", "size", "sizes", "rate", "jitter", "burst",
                "switch", "src_port", "dst_port", "offset", "attackers"});
    AttackVector v;
    v.id = as_str(require(n, path, "id"), path + ".id");
    v.protocol = parse_protocol(require(n, path, "protocol"), path + ".protocol");
    if (n["size"] && n["sizes"]) fail(n, path, "'size' and 'sizes' are exclusive");
    if (n["size"]) {
        v.sizes = SizeDistribution::single(
            static_cast<std::uint32_t>(as_int(n["size"], path + ".size")));
    } else if (n["sizes"]) {
        v.sizes = parse_sizes(n["sizes"], path + ".sizes");
    } else {
        fail(n, path, "missing 'size' or 'sizes'");
    }
    v.rate_bps = as_double(require(n, path, "rate"), path + ".rate");
    if (n["jitter"]) v.jitter = as_double(n["jitter"], path + ".jitter");
    v.burst = to_ns(as_double(require(n, path, "burst"), path + ".burst"));
    if (n["switch"]) v.switch_gap = to_ns(as_double(n["switch"], path + ".switch"));
    if (n["src_port"]) v.src_port = parse_port(n["src_port"], path + ".src_port");
    if (n["dst_port"]) v.dst_port = parse_port(n["dst_port"], path + ".dst_port");
    if (n["offset"]) v.offset = to_ns(as_double(n["offset"], path + ".offset"));
    if (n["attackers"]) {
        const YAML::Node atk = n["attackers"];
        if (!atk.IsMap()) fail(atk, path + ".attackers", "expected map");
        for (const auto& it : atk) {
            const std::string node_name = it.first.as<std::string>();
            const std::string apath = path + ".attackers." + node_name;
            AttackerOverride ov;
            if (it.second.IsDefined() && !it.second.IsNull()) {
                check_keys(it.second, apath, {"rate", "size", "sizes"});
                if (it.second["rate"]) {
                    ov.rate_bps = as_double(it.second["rate"], apath + ".rate");
                }
                if (it.second["size"] && it.second["sizes"]) {
                    fail(it.second, apath, "'size' and 'sizes' are exclusive");
                }
                if (it.second["size"]) {
                    ov.sizes = SizeDistribution::single(static_cast<std::uint32_t>(
                        as_int(it.second["size"], apath + ".size")));
                } else if (it.second["sizes"]) {
                    ov.sizes = parse_sizes(it.second["sizes"], apath + ".sizes");
                }
            }
            v.attackers.emplace(node_name, std::move(ov));
        }
    }
    return v;
}

bool is_token(const std::string& s) {
    if (s.empty()) return false;
    return std::all_of(s.begin(), s.end(), [](unsigned char c) {
        return std::isalnum(c) || c == '-';
    });
}

std::string fmt_double(double v) {
    char buf[40];
    if (v == static_cast<double>(static_cast<long long>(v)) &&
        std::abs(v) < 1e15) {
        std::snprintf(buf, sizeof buf, "%lld", static_cast<long long>(v));
        return buf;
    }
    std::snprintf(buf, sizeof buf, "%.17g", v);
    // Trim to the shortest form that round-trips.
    for (int prec = 1; prec < 17; ++prec) {
        char probe[40];
        std::snprintf(probe, sizeof probe, "%.*g", prec, v);
        if (std::strtod(probe, nullptr) == v) return probe;
    }
    return buf;
}

std::string fmt_seconds(SimTime t) { return fmt_double(to_seconds(t)); }

void emit_sizes(std::ostringstream& out, const SizeDistribution& d,
                const std::string& indent) {
    if (d.entries.size() == 1 && d.entries[0].weight == 1.0) {
        out << indent << "size: " << d.entries[0].size << "\n";
        return;
    }
    out << indent << "sizes:\n";
    for (const auto& e : d.entries) {
        out << indent << "  " << e.size << ": " << fmt_double(e.weight) << "\n";
    }
}

void emit_port(std::ostringstream& out, const char* key, const PortSpec& p,
               const std::string& indent) {
    out << indent << key << ": ";
    if (p.random) {
        out << "random\n";
    } else {
        out << p.value << "\n";
    }
}

}  // namespace

ParseError::ParseError(int line_, std::string key_, std::string reason_)
    : std::runtime_error("parse error at line " + std::to_string(line_) + ", '" +
                         key_ + "': " + reason_),
      line(line_),
      key(std::move(key_)),
      reason(std::move(reason_)) {}

ValidationError::ValidationError(ValidationReport r)
    : std::runtime_error("invalid scenario:\n" + r.to_string()),
      report(std::move(r)) {}

const char* protocol_name(Protocol p) {
    switch (p) {
        case Protocol::TcpSyn: return "tcp_syn";
        case Protocol::Udp: return "udp";
        case Protocol::Icmp: return "icmp";
        case Protocol::Mixed: return "mixed";
    }
    return "?";
}

const char* role_name(Role r) {
    switch (r) {
        case Role::Attacker: return "attacker";
        case Role::Benign: return "benign";
        case Role::Target: return "target";
        case Role::NonTarget: return "non-target";
    }
    return "?";
}

double SizeDistribution::mean_size() const {
    double total = 0.0, weight = 0.0;
    for (const auto& e : entries) {
        total += e.size * e.weight;
        weight += e.weight;
    }
    return weight > 0.0 ? total / weight : 0.0;
}

Role AsSpec::role_of(int index) const {
    const auto it = roles.find(index);
    if (it != roles.end()) return it->second;
    return index < client_count ? Role::Benign : Role::NonTarget;
}

std::string AsSpec::client_name(int i) const {
    return id + "-C" + std::to_string(i);
}
std::string AsSpec::server_name(int i) const {
    return id + "-S" + std::to_string(i);
}
std::string AsSpec::gateway_name() const { return id + "-GW"; }

bool ValidationReport::ok() const { return error_count() == 0; }

std::size_t ValidationReport::error_count() const {
    return static_cast<std::size_t>(
        std::count_if(findings.begin(), findings.end(), [](const Finding& f) {
            return f.severity == Finding::Severity::Error;
        }));
}

std::string ValidationReport::to_string() const {
    std::ostringstream out;
    for (const auto& f : findings) {
        out << (f.severity == Finding::Severity::Error ? "error" : "warning")
            << ": " << f.path << ": " << f.message << "\n";
    }
    return out.str();
}

ScenarioConfig parse_config(const std::string& text) {
    YAML::Node root;
    try {
        root = YAML::Load(text);
    } catch (const YAML::ParserException& e) {
        throw ParseError(e.mark.line + 1, "", e.msg);
    }
    if (!root.IsMap()) throw ParseError(1, "", "top level must be a map");

    check_keys(root, "",
               {"name", "seed", "duration", "central_network",
                "autonomous_systems", "attack", "benign", "capture"});

    ScenarioConfig cfg;
    cfg.name = as_str(require(root, "", "name"), "name");
    if (root["seed"]) cfg.seed = as_u64(root["seed"], "seed");
    cfg.duration = to_ns(as_double(require(root, "", "duration"), "duration"));

    {
        const YAML::Node cn = require(root, "", "central_network");
        check_keys(cn, "central_network",
                   {"nodes", "redundancy", "link_rate", "link_delay", "queue_len"});
        cfg.central_network.node_count =
            as_int(require(cn, "central_network", "nodes"), "central_network.nodes");
        if (cn["redundancy"]) {
            cfg.central_network.redundancy =
                as_double(cn["redundancy"], "central_network.redundancy");
        }
        if (cn["link_rate"]) {
            cfg.central_network.link_rate_bps =
                as_double(cn["link_rate"], "central_network.link_rate");
        }
        if (cn["link_delay"]) {
            cfg.central_network.link_delay =
                to_ns(as_double(cn["link_delay"], "central_network.link_delay"));
        }
        if (cn["queue_len"]) {
            cfg.central_network.queue_len =
                as_int(cn["queue_len"], "central_network.queue_len");
        }
    }

    if (root["autonomous_systems"]) {
        const YAML::Node list = root["autonomous_systems"];
        if (!list.IsSequence()) {
            fail(list, "autonomous_systems", "expected sequence");
        }
        int idx = 0;
        for (const auto& item : list) {
            const std::string path =
                "autonomous_systems[" + std::to_string(idx++) + "]";
            check_keys(item, path,
                       {"id", "clients", "servers", "roles", "link_rate",
                        "link_delay"});
            AsSpec as_spec;
            as_spec.id = as_str(require(item, path, "id"), path + ".id");
            if (item["clients"]) {
                as_spec.client_count = as_int(item["clients"], path + ".clients");
            }
            if (item["servers"]) {
                as_spec.server_count = as_int(item["servers"], path + ".servers");
            }
            if (item["roles"]) {
                const YAML::Node roles = item["roles"];
                if (!roles.IsMap()) fail(roles, path + ".roles", "expected map");
                for (const auto& r : roles) {
                    const int key = as_int(r.first, path + ".roles");
                    as_spec.roles[key] =
                        parse_role(r.second, path + ".roles." + std::to_string(key));
                }
            }
            if (item["link_rate"]) {
                as_spec.link_rate_bps =
                    as_double(item["link_rate"], path + ".link_rate");
            }
            if (item["link_delay"]) {
                as_spec.link_delay =
                    to_ns(as_double(item["link_delay"], path + ".link_delay"));
            }
            cfg.autonomous_systems.push_back(std::move(as_spec));
        }
    }

    if (root["attack"]) {
        const YAML::Node atk = root["attack"];
        check_keys(atk, "attack", {"vectors", "targets"});
        if (atk["vectors"]) {
            const YAML::Node vecs = atk["vectors"];
            if (!vecs.IsSequence()) fail(vecs, "attack.vectors", "expected sequence");
            int idx = 0;
            for (const auto& vn : vecs) {
                cfg.vectors.push_back(parse_vector(
                    vn, "attack.vectors[" + std::to_string(idx++) + "]"));
            }
        }
        if (atk["targets"]) {
            const YAML::Node tgts = atk["targets"];
            if (!tgts.IsSequence()) fail(tgts, "attack.targets", "expected sequence");
            for (const auto& t : tgts) {
                cfg.targets.push_back(as_str(t, "attack.targets"));
            }
        }
    }

    if (root["benign"]) {
        const YAML::Node b = root["benign"];
        check_keys(b, "benign",
                   {"request_size", "response_packets_mean",
                    "response_packet_size", "think_time_mean", "include_targets"});
        if (b["request_size"]) {
            cfg.benign.request_size = static_cast<std::uint32_t>(
                as_int(b["request_size"], "benign.request_size"));
        }
        if (b["response_packets_mean"]) {
            cfg.benign.response_packets_mean =
                as_double(b["response_packets_mean"], "benign.response_packets_mean");
        }
        if (b["response_packet_size"]) {
            cfg.benign.response_packet_size = static_cast<std::uint32_t>(
                as_int(b["response_packet_size"], "benign.response_packet_size"));
        }
        if (b["think_time_mean"]) {
            cfg.benign.think_time_mean =
                as_double(b["think_time_mean"], "benign.think_time_mean");
        }
        if (b["include_targets"]) {
            cfg.benign.include_targets =
                as_bool(b["include_targets"], "benign.include_targets");
        }
    }

    if (root["capture"]) {
        const YAML::Node c = root["capture"];
        check_keys(c, "capture", {"prefix", "suffix", "bidirectional", "as_links"});
        if (c["prefix"]) cfg.capture.prefix = as_str(c["prefix"], "capture.prefix");
        if (c["suffix"]) cfg.capture.suffix = as_str(c["suffix"], "capture.suffix");
        if (c["bidirectional"]) {
            cfg.capture.bidirectional =
                as_bool(c["bidirectional"], "capture.bidirectional");
        }
        if (c["as_links"]) {
            cfg.capture.as_links = as_bool(c["as_links"], "capture.as_links");
        }
    }
    if (cfg.capture.prefix.empty()) cfg.capture.prefix = cfg.name;

    ValidationReport report = validate(cfg);
    if (!report.ok()) throw ValidationError(std::move(report));
    return cfg;
}

ScenarioConfig load_config_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError(-1, path, "cannot open file");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

namespace {

void check_size_dist(const SizeDistribution& d, const std::string& path,
                     Protocol proto, std::vector<Finding>& out) {
    auto err = [&](const std::string& p, const std::string& m) {
        out.push_back({Finding::Severity::Error, p, m});
    };
    if (d.entries.empty()) {
        err(path, "size distribution is empty");
        return;
    }
    double sum = 0.0;
    for (std::size_t i = 0; i < d.entries.size(); ++i) {
        const auto& e = d.entries[i];
        const std::string epath = path + "[" + std::to_string(i) + "]";
        if (e.size < 28) err(epath, "size must be >= 28 bytes");
        if (proto == Protocol::TcpSyn && e.size < 40) {
            err(epath, "tcp_syn packets need >= 40 bytes");
        }
        if (e.weight <= 0.0) err(epath, "weight must be > 0");
        sum += e.weight;
    }
    if (std::abs(sum - 1.0) > 1e-9) {
        char buf[64];
        std::snprintf(buf, sizeof buf, "weights sum %.6g, expected 1", sum);
        err(path, buf);
    }
}

}  // namespace

ValidationReport validate(const ScenarioConfig& cfg) {
    ValidationReport report;
    auto err = [&](const std::string& p, const std::string& m) {
        report.findings.push_back({Finding::Severity::Error, p, m});
    };
    auto warn = [&](const std::string& p, const std::string& m) {
        report.findings.push_back({Finding::Severity::Warning, p, m});
    };

    if (!is_token(cfg.name)) {
        err("name", "must be a non-empty token of [A-Za-z0-9-]");
    }
    if (cfg.duration <= 0) err("duration", "must be > 0");

    if (cfg.central_network.node_count < 1) {
        err("central_network.nodes", "must be >= 1");
    }
    if (cfg.central_network.redundancy < 0.0 ||
        cfg.central_network.redundancy > 1.0) {
        err("central_network.redundancy", "must be in [0, 1]");
    }
    if (cfg.central_network.link_rate_bps <= 0.0) {
        err("central_network.link_rate", "must be > 0");
    }
    if (cfg.central_network.link_delay < 0) {
        err("central_network.link_delay", "must be >= 0");
    }
    if (cfg.central_network.queue_len < 1) {
        err("central_network.queue_len", "must be >= 1");
    }

    bool any_attacker = false;
    bool any_benign_client = false;
    std::set<std::string> as_ids;
    std::set<std::string> server_names;   // all declared servers
    std::set<std::string> target_roles;   // servers with role target
    std::set<std::string> attacker_names; // clients with role attacker
    int non_target_servers = 0;

    for (std::size_t i = 0; i < cfg.autonomous_systems.size(); ++i) {
        const AsSpec& as_spec = cfg.autonomous_systems[i];
        const std::string path = "autonomous_systems[" + std::to_string(i) + "]";
        if (!is_token(as_spec.id)) {
            err(path + ".id", "must be a non-empty token of [A-Za-z0-9-]");
        }
        if (!as_ids.insert(as_spec.id).second) {
            err(path + ".id", "duplicate AS id '" + as_spec.id + "'");
        }
        if (as_spec.client_count < 0) err(path + ".clients", "must be >= 0");
        if (as_spec.server_count < 0) err(path + ".servers", "must be >= 0");
        if (as_spec.link_rate_bps <= 0.0) err(path + ".link_rate", "must be > 0");
        if (as_spec.link_delay < 0) err(path + ".link_delay", "must be >= 0");

        const int total = as_spec.client_count + as_spec.server_count;
        for (const auto& [index, role] : as_spec.roles) {
            const std::string rpath = path + ".roles." + std::to_string(index);
            if (index < 0 || index >= total) {
                err(rpath, "index outside declared clients+servers");
                continue;
            }
            const bool is_client = index < as_spec.client_count;
            if (is_client && (role == Role::Target || role == Role::NonTarget)) {
                err(rpath, "server role on a client node");
            }
            if (!is_client && (role == Role::Attacker || role == Role::Benign)) {
                err(rpath, "client role on a server node");
            }
        }
        for (int c = 0; c < as_spec.client_count; ++c) {
            const Role r = as_spec.role_of(c);
            if (r == Role::Attacker) {
                any_attacker = true;
                attacker_names.insert(as_spec.client_name(c));
            } else if (r == Role::Benign) {
                any_benign_client = true;
            }
        }
        for (int s = 0; s < as_spec.server_count; ++s) {
            const std::string name = as_spec.server_name(s);
            server_names.insert(name);
            if (as_spec.role_of(as_spec.client_count + s) == Role::Target) {
                target_roles.insert(name);
            } else {
                ++non_target_servers;
            }
        }
    }
    if (cfg.autonomous_systems.empty()) {
        warn("autonomous_systems", "no autonomous systems declared");
    }

    std::set<std::string> vector_ids;
    for (std::size_t i = 0; i < cfg.vectors.size(); ++i) {
        const AttackVector& v = cfg.vectors[i];
        const std::string path = "attack.vectors[" + std::to_string(i) + "]";
        if (!is_token(v.id)) {
            err(path + ".id", "must be a non-empty token of [A-Za-z0-9-]");
        }
        if (!vector_ids.insert(v.id).second) {
            err(path + ".id", "duplicate vector id '" + v.id + "'");
        }
        if (v.rate_bps <= 0.0) err(path + ".rate", "must be > 0");
        if (v.burst <= 0) err(path + ".burst", "must be > 0");
        if (v.switch_gap < 0) err(path + ".switch", "must be >= 0");
        if (v.jitter < 0.0) err(path + ".jitter", "must be >= 0");
        if (v.jitter >= 1.0) err(path + ".jitter", "jitter must be < 1");
        if (v.offset && *v.offset < 0) err(path + ".offset", "must be >= 0");
        check_size_dist(v.sizes, path + ".sizes", v.protocol, report.findings);
        for (const auto& [node, ov] : v.attackers) {
            const std::string apath = path + ".attackers." + node;
            if (!attacker_names.count(node)) {
                err(apath, "does not reference a client with role attacker");
            }
            if (ov.rate_bps && *ov.rate_bps <= 0.0) {
                err(apath + ".rate", "must be > 0");
            }
            if (ov.sizes) {
                check_size_dist(*ov.sizes, apath + ".sizes", v.protocol,
                                report.findings);
            }
        }
    }

    // Explicit offsets may overlap vectors on purpose, but windows pushed
    // past the cycle boundary cannot repeat periodically.
    if (!cfg.targets.empty()) {
        const SimTime n_targets = static_cast<SimTime>(cfg.targets.size());
        SimTime cycle = 0;
        for (const AttackVector& v : cfg.vectors) {
            cycle += n_targets * v.burst + (n_targets - 1) * v.switch_gap;
        }
        for (std::size_t i = 0; i < cfg.vectors.size(); ++i) {
            const AttackVector& v = cfg.vectors[i];
            if (!v.offset) continue;
            const SimTime span =
                n_targets * v.burst + (n_targets - 1) * v.switch_gap;
            if (*v.offset + span > cycle) {
                warn("attack.vectors[" + std::to_string(i) + "].offset",
                     "windows extend past the cycle length; they will not "
                     "repeat periodically");
            }
        }
    }

    if (any_attacker && cfg.vectors.empty()) {
        err("attack.vectors", "attacker roles declared but no vectors");
    }
    if (!cfg.vectors.empty() && cfg.targets.empty()) {
        err("attack.targets", "vectors declared but no targets");
    }
    if (!cfg.vectors.empty() && !any_attacker) {
        warn("attack.vectors", "vectors declared but no attacker-role clients");
    }
    if (cfg.vectors.empty() && !cfg.targets.empty()) {
        warn("attack.targets", "targets declared but no vectors");
    }

    std::set<std::string> seen_targets;
    for (std::size_t i = 0; i < cfg.targets.size(); ++i) {
        const std::string& t = cfg.targets[i];
        const std::string path = "attack.targets[" + std::to_string(i) + "]";
        if (!seen_targets.insert(t).second) {
            err(path, "duplicate target '" + t + "'");
            continue;
        }
        if (!server_names.count(t)) {
            err(path, "'" + t + "' is not a declared server node");
        } else if (!target_roles.count(t)) {
            err(path, "'" + t + "' does not have role target");
        }
    }

    if (cfg.benign.request_size < 40) {
        err("benign.request_size", "must be >= 40 (TCP request)");
    }
    if (cfg.benign.response_packets_mean <= 0.0) {
        err("benign.response_packets_mean", "must be > 0");
    }
    if (cfg.benign.response_packet_size < 40) {
        err("benign.response_packet_size", "must be >= 40 (TCP response)");
    }
    if (cfg.benign.think_time_mean <= 0.0) {
        err("benign.think_time_mean", "must be > 0");
    }
    if (any_benign_client) {
        const int pool = non_target_servers +
                         (cfg.benign.include_targets
                              ? static_cast<int>(target_roles.size())
                              : 0);
        if (pool == 0) {
            err("benign", "benign clients declared but the server pool is empty");
        }
    }

    auto check_capture_token = [&](const std::string& value, const char* key) {
        if (value.empty() || value.find("__") != std::string::npos ||
            value.find('/') != std::string::npos ||
            value.find('\\') != std::string::npos) {
            err(std::string("capture.") + key,
                "must be non-empty and free of '__' and path separators");
        }
    };
    check_capture_token(cfg.capture.prefix, "prefix");
    check_capture_token(cfg.capture.suffix, "suffix");

    return report;
}

std::string serialize_config(const ScenarioConfig& cfg) {
    std::ostringstream out;
    out << "name: " << cfg.name << "\n";
    out << "seed: " << cfg.seed << "\n";
    out << "duration: " << fmt_seconds(cfg.duration) << "\n";
    out << "central_network:\n";
    out << "  nodes: " << cfg.central_network.node_count << "\n";
    out << "  redundancy: " << fmt_double(cfg.central_network.redundancy) << "\n";
    out << "  link_rate: " << fmt_double(cfg.central_network.link_rate_bps) << "\n";
    out << "  link_delay: " << fmt_seconds(cfg.central_network.link_delay) << "\n";
    out << "  queue_len: " << cfg.central_network.queue_len << "\n";
    out << "autonomous_systems:\n";
    for (const AsSpec& as_spec : cfg.autonomous_systems) {
        out << "  - id: " << as_spec.id << "\n";
        out << "    clients: " << as_spec.client_count << "\n";
        out << "    servers: " << as_spec.server_count << "\n";
        if (!as_spec.roles.empty()) {
            out << "    roles:\n";
            for (const auto& [index, role] : as_spec.roles) {
                out << "      " << index << ": " << role_name(role) << "\n";
            }
        }
        out << "    link_rate: " << fmt_double(as_spec.link_rate_bps) << "\n";
        out << "    link_delay: " << fmt_seconds(as_spec.link_delay) << "\n";
    }
    if (!cfg.vectors.empty() || !cfg.targets.empty()) {
        out << "attack:\n";
        if (!cfg.vectors.empty()) {
            out << "  vectors:\n";
            for (const AttackVector& v : cfg.vectors) {
                out << "    - id: " << v.id << "\n";
                out << "      protocol: " << protocol_name(v.protocol) << "\n";
                emit_sizes(out, v.sizes, "      ");
                out << "      rate: " << fmt_double(v.rate_bps) << "\n";
                out << "      jitter: " << fmt_double(v.jitter) << "\n";
                out << "      burst: " << fmt_seconds(v.burst) << "\n";
                out << "      switch: " << fmt_seconds(v.switch_gap) << "\n";
                emit_port(out, "src_port", v.src_port, "      ");
                emit_port(out, "dst_port", v.dst_port, "      ");
                if (v.offset) {
                    out << "      offset: " << fmt_seconds(*v.offset) << "\n";
                }
                if (!v.attackers.empty()) {
                    out << "      attackers:\n";
                    for (const auto& [node, ov] : v.attackers) {
                        if (!ov.rate_bps && !ov.sizes) {
                            out << "        " << node << ": {}\n";
                            continue;
                        }
                        out << "        " << node << ":\n";
                        if (ov.rate_bps) {
                            out << "          rate: " << fmt_double(*ov.rate_bps)
                                << "\n";
                        }
                        if (ov.sizes) emit_sizes(out, *ov.sizes, "          ");
                    }
                }
            }
        }
        if (!cfg.targets.empty()) {
            out << "  targets:\n";
            for (const std::string& t : cfg.targets) {
                out << "    - " << t << "\n";
            }
        }
    }
    out << "benign:\n";
    out << "  request_size: " << cfg.benign.request_size << "\n";
    out << "  response_packets_mean: " << fmt_double(cfg.benign.response_packets_mean)
        << "\n";
    out << "  response_packet_size: " << cfg.benign.response_packet_size << "\n";
    out << "  think_time_mean: " << fmt_double(cfg.benign.think_time_mean) << "\n";
    out << "  include_targets: " << (cfg.benign.include_targets ? "true" : "false")
        << "\n";
    out << "capture:\n";
    out << "  prefix: " << cfg.capture.prefix << "\n";
    out << "  suffix: " << cfg.capture.suffix << "\n";
    out << "  bidirectional: " << (cfg.capture.bidirectional ? "true" : "false")
        << "\n";
    out << "  as_links: " << (cfg.capture.as_links ? "true" : "false") << "\n";
    return out.str();
}

}  // namespace pulsewave

#ifndef PULSEWAVE_CLI_HPP
#define PULSEWAVE_CLI_HPP

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace pulsewave {

// Single command-line entry point. Diagnostics go to the error stream;
// machine-readable output (schedule table, composition report) goes to the
// output stream or files.

struct CliInvocation {
    enum class Command { Validate, Schedule, Run, Analyze };
    Command command = Command::Validate;
    std::string config_path;               // scenario YAML
    std::vector<std::string> inputs;       // analyze: pcap files
    std::string out_dir;                   // run/analyze output directory
    std::optional<std::uint64_t> seed_override;
    int bin_ms = 100;
    std::string format = "csv";            // csv | svg | both
    bool force = false;                    // allow non-empty run output dir
};

// Exit codes: 0 success, 1 validation/analysis findings, 2 usage error,
// 3 I/O error.
int dispatch(const CliInvocation& inv, std::ostream& out, std::ostream& err);

}  // namespace pulsewave

#endif

#include "pulsewave/cli.hpp"

#include <filesystem>
#include <ostream>

#include "pulsewave/analysis.hpp"
#include "pulsewave/engine.hpp"

namespace pulsewave {

namespace fs = std::filesystem;

namespace {

constexpr int kOk = 0;
constexpr int kFindings = 1;
constexpr int kUsage = 2;
constexpr int kIo = 3;

int run_validate(const CliInvocation& inv, std::ostream& out, std::ostream& err) {
    ScenarioConfig cfg;
    try {
        cfg = load_config_file(inv.config_path);
    } catch (const ValidationError& e) {
        err << e.report.to_string();
        return kFindings;
    } catch (const ParseError& e) {
        err << e.what() << "\n";
        return kFindings;
    }
    const ValidationReport report = validate(cfg);  // surfaces warnings
    err << report.to_string();
    err << inv.config_path << ": ok (" << report.findings.size()
        << " warnings)\n";
    (void)out;
    return kOk;
}

int run_schedule(const CliInvocation& inv, std::ostream& out, std::ostream& err) {
    ScenarioConfig cfg;
    try {
        cfg = load_config_file(inv.config_path);
    } catch (const std::exception& e) {
        err << e.what() << "\n";
        return kFindings;
    }
    const Timetable tt = build_timetable(
        cfg.vectors, static_cast<int>(cfg.targets.size()), cfg.duration);
    out << tt.format(cfg.vectors, cfg.targets);
    return kOk;
}

int run_run(const CliInvocation& inv, std::ostream& out, std::ostream& err) {
    ScenarioConfig cfg;
    try {
        cfg = load_config_file(inv.config_path);
    } catch (const std::exception& e) {
        err << e.what() << "\n";
        return kFindings;
    }
    if (inv.seed_override) cfg.seed = *inv.seed_override;

    if (inv.out_dir.empty()) {
        err << "run: output directory required (-o DIR)\n";
        return kUsage;
    }
    std::error_code ec;
    if (fs::exists(inv.out_dir, ec)) {
        if (!fs::is_directory(inv.out_dir, ec)) {
            err << "run: " << inv.out_dir << " is not a directory\n";
            return kUsage;
        }
        if (!fs::is_empty(inv.out_dir, ec) && !inv.force) {
            err << "run: output directory " << inv.out_dir
                << " is not empty (use --force to overwrite)\n";
            return kUsage;
        }
    } else if (!fs::create_directories(inv.out_dir, ec)) {
        err << "run: cannot create " << inv.out_dir << ": " << ec.message()
            << "\n";
        return kIo;
    }

    try {
        Engine engine(std::move(cfg));
        const RunReport report = engine.run(inv.out_dir);
        err << "run: " << report.attack_packets << " attack packets, "
            << report.benign_packets << " benign packets, "
            << report.events_executed << " events, "
            << report.captures.size() << " capture files, "
            << report.wallclock_ms << " ms\n";
    } catch (const IoError& e) {
        err << "run: I/O error: " << e.what() << "\n";
        return kIo;
    }
    (void)out;
    return kOk;
}

int run_analyze(const CliInvocation& inv, std::ostream& out, std::ostream& err) {
    if (inv.inputs.empty()) {
        err << "analyze: at least one pcap file required\n";
        return kUsage;
    }
    std::optional<ScenarioConfig> cfg;
    std::optional<Timetable> tt;
    std::vector<VectorSignature> sigs;
    if (!inv.config_path.empty()) {
        try {
            cfg = load_config_file(inv.config_path);
        } catch (const std::exception& e) {
            err << e.what() << "\n";
            return kFindings;
        }
        sigs = signatures_from_config(*cfg);
        tt = build_timetable(cfg->vectors,
                             static_cast<int>(cfg->targets.size()),
                             cfg->duration);
    }

    const std::string dir = inv.out_dir.empty() ? "." : inv.out_dir;
    std::error_code ec;
    fs::create_directories(dir, ec);

    bool findings = false;
    for (const std::string& input : inv.inputs) {
        std::vector<PacketRecord> records;
        try {
            records = read_pcap(input);
        } catch (const MalformedPcap& e) {
            err << input << ": " << e.what() << "\n";
            findings = true;
            continue;
        }
        const TimeSeries series =
            bin_timeseries(records, static_cast<std::int64_t>(inv.bin_ms) * 1000,
                           GroupBy::Protocol);
        const std::string base = fs::path(input).stem().string();
        try {
            if (inv.format == "csv" || inv.format == "both") {
                export_csv(series, dir + "/" + base + ".csv");
            }
            if (inv.format == "svg" || inv.format == "both") {
                export_svg(series, dir + "/" + base + ".svg", base);
            }
        } catch (const IoError& e) {
            err << e.what() << "\n";
            return kIo;
        }
        if (cfg) {
            const CompositionReport report =
                composition_report(records, sigs, tt ? &*tt : nullptr);
            out << "# " << input << "\n" << report.format();
            if (report.unattributed_warning) {
                err << input << ": warning: more than 1% of attack packets "
                       "match no vector signature\n";
                findings = true;
            }
        }
    }
    return findings ? kFindings : kOk;
}

}  // namespace

int dispatch(const CliInvocation& inv, std::ostream& out, std::ostream& err) {
    switch (inv.command) {
        case CliInvocation::Command::Validate: return run_validate(inv, out, err);
        case CliInvocation::Command::Schedule: return run_schedule(inv, out, err);
        case CliInvocation::Command::Run: return run_run(inv, out, err);
        case CliInvocation::Command::Analyze: return run_analyze(inv, out, err);
    }
    return kUsage;
}

}  // namespace pulsewave

#include <iostream>

#include <CLI11.hpp>

#include "pulsewave/cli.hpp"

int main(int argc, char** argv) {
    CLI::App app{"pulse-wave DDoS dataset simulator"};
    app.require_subcommand(1);

    pulsewave::CliInvocation inv;
    std::uint64_t seed = 0;

    CLI::App* validate =
        app.add_subcommand("validate", "check a scenario configuration");
    validate->add_option("config", inv.config_path, "scenario YAML file")
        ->required();

    CLI::App* schedule =
        app.add_subcommand("schedule", "print the first-cycle attack timetable");
    schedule->add_option("config", inv.config_path, "scenario YAML file")
        ->required();

    CLI::App* run = app.add_subcommand("run", "simulate and write pcaps");
    run->add_option("config", inv.config_path, "scenario YAML file")->required();
    run->add_option("-o,--out", inv.out_dir, "output directory")->required();
    CLI::Option* seed_opt =
        run->add_option("--seed", seed, "override the scenario seed");
    run->add_flag("--force", inv.force, "allow a non-empty output directory");

    CLI::App* analyze =
        app.add_subcommand("analyze", "bin and export capture files");
    analyze->add_option("pcaps", inv.inputs, "capture files")->required();
    analyze->add_option("--config", inv.config_path,
                        "scenario YAML for vector attribution");
    analyze->add_option("-o,--out", inv.out_dir, "output directory");
    analyze->add_option("--bin-ms", inv.bin_ms, "bin width in milliseconds")
        ->check(CLI::PositiveNumber);
    analyze->add_option("--format", inv.format, "csv | svg | both")
        ->check(CLI::IsMember({"csv", "svg", "both"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;  // usage errors exit 2
    }

    if (validate->parsed()) {
        inv.command = pulsewave::CliInvocation::Command::Validate;
    } else if (schedule->parsed()) {
        inv.command = pulsewave::CliInvocation::Command::Schedule;
    } else if (run->parsed()) {
        inv.command = pulsewave::CliInvocation::Command::Run;
        if (seed_opt->count() > 0) inv.seed_override = seed;
    } else if (analyze->parsed()) {
        inv.command = pulsewave::CliInvocation::Command::Analyze;
    }

    return pulsewave::dispatch(inv, std::cout, std::cerr);
}

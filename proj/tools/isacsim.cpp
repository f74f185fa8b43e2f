// SPDX-License-Identifier: Apache-2.0
// Command-line front end: isacsim [--config PATH] [--seed U64] [--trials INT] [--out DIR] <subcommand>
#include <cstdio>
#include <exception>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "isac/config.hpp"
#include "isac/report.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitRuntime = 1;
constexpr int kExitConfig = 2;

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Monte Carlo ISAC link simulator"};
    app.set_version_flag("--version", isac::version());

    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<long> trials;
    std::optional<std::string> out_dir;
    std::string subcommand;

    app.add_option("--config", config_path, "JSON run configuration (defaults when omitted)");
    app.add_option("--seed", seed, "Base seed for the Monte Carlo trials");
    app.add_option("--trials", trials, "Trials per operating point")->check(CLI::PositiveNumber);
    app.add_option("--out", out_dir, "Output directory for CSV and metadata files");
    app.add_option("subcommand", subcommand, "rcs-sweep | ts-sweep | tradeoff | single")
        ->required()
        ->check(CLI::IsMember({"rcs-sweep", "ts-sweep", "tradeoff", "single"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitConfig;
    }

    isac::RunConfig config;
    isac::Subcommand sub{};
    try {
        if (!config_path.empty()) config = isac::load_config(config_path);
        if (seed) config.seed = *seed;
        if (trials) config.trials = *trials;
        if (out_dir) config.output_dir = *out_dir;
        sub = isac::parse_subcommand(subcommand);
        config.validate();
    } catch (const isac::ConfigError& e) {
        std::cerr << "isacsim: " << e.what() << '\n';
        return kExitConfig;
    }

    try {
        const auto art = isac::run(config, sub);
        for (const auto& f : art.csv_files) std::cout << f.string() << '\n';
        std::cout << art.metadata.string() << '\n';
    } catch (const isac::ConfigError& e) {
        std::cerr << "isacsim: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "isacsim: error: " << e.what() << '\n';
        return kExitRuntime;
    }
    return kExitOk;
}

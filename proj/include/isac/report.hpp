// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "isac/config.hpp"
#include "isac/engine.hpp"

namespace isac {

enum class Subcommand { RcsSweep, TsSweep, Tradeoff, Single };

/// "rcs-sweep", "ts-sweep", "tradeoff", "single"; throws ConfigError otherwise.
Subcommand parse_subcommand(const std::string& name);
std::string subcommand_name(Subcommand sub);

/// Header line without trailing newline.
std::string csv_header();
/// Header plus one line per row, '\n' terminated.
std::string format_csv(const SweepResult& result);

/// Output file stem for one (subcommand, policy) pair, e.g. "rcs-sweep_time_sharing_beta1".
std::string csv_stem(Subcommand sub, const PolicySpec& policy);

struct RunArtifacts {
    std::vector<std::filesystem::path> csv_files;
    std::filesystem::path metadata;
    std::vector<SweepResult> results;
};

/// Runs the simulations for `sub` and writes CSVs plus `<sub>_metadata.json` into
/// `config.output_dir`. Files are staged and renamed into place; on any failure every file
/// written by this call is removed. `workers` <= 0 selects default_workers().
RunArtifacts run(const RunConfig& config, Subcommand sub, int workers = 0);

/// Simulations only, no I/O. Results are ordered as the CSV files.
std::vector<SweepResult> simulate(const RunConfig& config, Subcommand sub, int workers = 0);

/// Library version string.
std::string version();

}  // namespace isac

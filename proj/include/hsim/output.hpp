#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "hsim/engine.hpp"
#include "hsim/scenario.hpp"

namespace hsim {

inline constexpr const char* kToolVersion = "0.3.0";

/// Everything needed to repeat a run; written next to its outputs.
struct RunManifest {
    std::string command;
    std::vector<std::string> argv;  // the full original command line
    std::string scenario;
    std::uint64_t seed = 0;
    int n_trajectories = 1;
    int jobs = 1;
    std::string out;
    Overrides overrides;
    std::string tool_version = kToolVersion;
};

void write_manifest(const RunManifest& manifest, const std::filesystem::path& dir);
RunManifest read_manifest(const std::filesystem::path& path);

/// prices.csv, index.csv, transactions.csv, diagnostics.csv, summary.json
void write_trajectory(const TrajectoryOutput& out, const ScenarioConfig& config, const std::filesystem::path& dir);

/// quantiles.csv, trajectories.csv, start_end.csv, summary.json
void write_ensemble(const EnsembleOutput& out, const EnsembleSummary& summary, const std::filesystem::path& dir);

/// Prices as "%.17g" text, empty for none.
std::string format_price(const MaybePrice& p);

}  // namespace hsim

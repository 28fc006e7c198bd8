#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "cournot/experiment.hpp"

namespace cournot {

/// Everything needed to audit or re-run a simulation directory.
struct RunManifest {
  ExperimentSpec spec;
  double beta = 0;  // resolved decay rate
  double nu = 0;    // implied exploration intensity
  std::string tool_version;
  std::string timestamp;  // ISO-8601 UTC
  std::vector<std::string> files;
};

std::string manifest_to_json(const RunManifest& manifest);
RunManifest manifest_from_json(const std::string& text);

/// Tool version compiled into the library.
std::string tool_version();

/// UTC timestamp: SOURCE_DATE_EPOCH when set (reproducible outputs),
/// the current time otherwise.
std::string current_timestamp();

struct WriteOptions {
  bool write_q = true;
  /// Empty means current_timestamp().
  std::string timestamp;
};

/// Files of a simulation directory.
namespace simfiles {
inline constexpr const char* kManifest = "manifest.json";
inline constexpr const char* kSummary = "summary.csv";
inline constexpr const char* kRuns = "runs.csv";
inline constexpr const char* kCycles = "cycles.csv";
inline constexpr const char* kQMatrices = "qmatrices.bin";
}  // namespace simfiles

std::string summary_csv(const ExperimentSummary& summary);
std::string runs_csv(const ExperimentSummary& summary);
std::string cycles_csv(const ExperimentSummary& summary);

/// Writes manifest, summary, per-run records, greedy cycles and (optionally)
/// the final Q-matrices into `dir`, creating it if needed.
RunManifest write_experiment(const std::filesystem::path& dir, const ExperimentSummary& summary,
                             const WriteOptions& options = {});

struct LoadedExperiment {
  RunManifest manifest;
  /// Means come from summary.csv; per-run outcomes from runs.csv (only Q,
  /// profits and surpluses are recorded there).
  ExperimentSummary summary;
  bool has_cycles = false;
  bool has_q = false;
};

/// Reads a simulation directory. Throws InputError when the manifest,
/// summary or per-run file is missing or malformed. Cycles and Q-matrices
/// are attached to the run records when present.
LoadedExperiment load_experiment(const std::filesystem::path& dir);

}  // namespace cournot

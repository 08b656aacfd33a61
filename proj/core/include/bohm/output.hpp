#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "bohm/config.hpp"
#include "bohm/experiments.hpp"
#include "bohm/version.hpp"

namespace bohm {

inline constexpr const char* kArtifactName = "bohmsim";
inline constexpr const char* kArtifactVersion = BOHM_VERSION_STRING;

/// Exit codes of run() and the bohmsim tool.
inline constexpr int kExitPass = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitCheckFailure = 2;

/// 17 significant digits, so every binary64 value reads back exactly.
[[nodiscard]] std::string format_real(double value);

void write_trajectories_csv(std::ostream& out, const TrajectoryEnsemble& ensemble,
                            const OutputOptions& options);
void write_fields_csv(std::ostream& out, const std::vector<WaveFunction>& fields,
                      const MassVector& masses);
void write_histograms_csv(std::ostream& out, const std::vector<Histogram>& histograms);
void write_h_series_csv(std::ostream& out, const HSeries* series);

/// Manifest document as text (pretty-printed JSON).
[[nodiscard]] std::string manifest_json(const RunConfig& config, const Overrides& overrides,
                                        const ExperimentReport& report);

struct RunOutcome {
  int exit_code = kExitError;
  std::filesystem::path manifest;
  std::vector<std::string> failed_checks;
  std::string error;
};

/// Runs the experiment and writes trajectories.csv, fields.csv,
/// histograms.csv, h_series.csv and finally manifest.json (atomically) into
/// the output directory. Errors never leave a manifest behind.
[[nodiscard]] RunOutcome run(const RunConfig& config, const Overrides& overrides = {});

}  // namespace bohm

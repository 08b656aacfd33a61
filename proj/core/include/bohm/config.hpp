#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "bohm/experiments.hpp"

namespace bohm {

struct OutputOptions {
  std::string directory = "bohm_out";
  /// Trajectories written to trajectories.csv (the first ones by id).
  std::size_t max_trajectories = 100;
  /// Every k-th record time is written.
  std::size_t trajectory_stride = 1;
  bool fields = true;

  friend bool operator==(const OutputOptions&, const OutputOptions&) = default;
};

struct RunConfig {
  ExperimentConfig experiment;
  /// Checks that decide the exit code; empty enables every check of the preset.
  std::vector<std::string> checks;
  OutputOptions output;

  friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

/// Command-line values that replace config entries before validation.
struct Overrides {
  std::optional<std::string> experiment;
  std::optional<std::string> output_directory;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> threads;
  std::optional<std::vector<std::string>> checks;

  [[nodiscard]] bool empty() const noexcept {
    return !experiment && !output_directory && !seed && !threads && !checks;
  }
};

/// Parses JSON (comments allowed) into a validated RunConfig. Every violation
/// is collected and reported together through SchemaViolation, each prefixed
/// with the path of the offending key.
[[nodiscard]] RunConfig parse_config(std::string_view text, const Overrides& overrides = {});

/// Canonical JSON form with every default filled in; parse_config accepts it
/// and returns an equal RunConfig.
[[nodiscard]] std::string serialize_config(const RunConfig& config);

/// Checks whose outcome sets the exit code.
[[nodiscard]] std::vector<std::string> enabled_checks(const RunConfig& config);

}  // namespace bohm

#pragma once

// Batch experiment driver. A run is described by a JSON document:
//
//   {
//     "preset": "euler2d",
//     "grid": {"dim": 2, "n": 64, "alias_fraction": 0.6666666666666666},
//     "alpha": 1.0, "dt": 0.001, "t_end": 1.0, "cadence": 10,
//     "initial_data": {"generator": "random_divergence_free", "seed": 1, "max_mode": 4},
//     "a_variant": "two_term", "r1_assembly": "literal", "spray_form": "conservative",
//     "output_dir": "h1diff-out", "emit_fields": false,
//     "checks": {"ch_window": 0.0, "deviation_eps": [1e-3, 1e-4, 1e-5],
//                "vanishing_trials": 0, "refine": true}
//   }
//
// Every key except "preset" is optional; see README for the defaults of each
// preset and the generators it accepts.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "h1diff/curvature.hpp"
#include "h1diff/geodesics.hpp"

namespace h1diff {

enum class Preset { Euler2d, Geodesic1d, VerifyGeodesics, CurvatureTable, JacobiStability, ConjugateScan };

std::span<const std::string_view> preset_names();
std::string_view to_string(Preset p);

struct InitialData {
  std::string generator;  // empty: the preset's default
  std::uint64_t seed = 1;
  int max_mode = 4;
  double amplitude = 1.0;
  std::string spec;  // field spec, or the profile h for the shear families
  double speed = 0.0;
  std::vector<std::string> directions;
  std::vector<int> wavenumbers{1, 2, 3};
  std::vector<double> speeds{0.0, 1.0};
  std::vector<std::pair<std::string, std::string>> pairs;
};

struct Checks {
  double ch_window = 0.0;
  std::vector<double> deviation_eps{1e-3, 1e-4, 1e-5};
  int vanishing_trials = 0;
  bool refine = true;
};

struct ExperimentConfig {
  Preset preset = Preset::Euler2d;
  int dim = 2;
  int n = 64;
  double alias_fraction = 2.0 / 3.0;
  double alpha = 1.0;
  double dt = 1e-3;
  double t_end = 1.0;
  int cadence = 10;
  InitialData initial_data;
  AVariant a_variant = AVariant::TwoTerm;
  R1Assembly r1_assembly = R1Assembly::Literal;
  SprayForm spray_form = SprayForm::Conservative;
  std::string output_dir = "h1diff-out";
  bool emit_fields = false;
  Checks checks;

  Grid grid() const { return Grid(dim, n, alias_fraction); }
};

struct ConfigError {
  std::string path;  // dotted key path, e.g. "grid.n" or "initial_data.directions[1]"
  std::string message;
  std::string to_string() const;
};

struct ParsedConfig {
  std::optional<ExperimentConfig> config;  // set only when errors is empty
  std::vector<ConfigError> errors;
};

/// Full schema check. Defaults are filled in for absent keys, including the
/// preset-dependent generator and grid.
ParsedConfig validate(std::string_view text);

/// Canonical JSON with every field spelled out; validate(to_json(c)) == c.
std::string to_json(const ExperimentConfig& config);

struct InvariantResult {
  std::string name;
  double value = 0.0;
  double threshold = 0.0;
  std::string comparison;  // "<=", ">=", ">", "==" relating value to threshold
  bool passed = false;
  bool hard = true;  // soft invariants are reported but do not fail the run
  std::string note;
};

struct OutputFile {
  std::string name;  // relative to output_dir
  std::uint64_t bytes = 0;
  std::uint64_t fnv1a = 0;
};

struct RunSummary {
  ExperimentConfig config;
  double wall_time = 0.0;
  std::vector<InvariantResult> invariants;
  std::vector<OutputFile> files;

  bool passed() const;
  std::string to_json() const;
};

/// Executes the preset, writing CSV series and summary.json into
/// config.output_dir. Numerical failures during the run are recorded as failed
/// invariants; I/O failures throw Error.
RunSummary run(const ExperimentConfig& config);

std::uint64_t fnv1a64(std::string_view bytes);

}  // namespace h1diff

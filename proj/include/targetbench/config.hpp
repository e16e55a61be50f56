#pragma once

#include <optional>
#include <string>
#include <utility>

#include "targetbench/dataset.hpp"
#include "targetbench/sweep.hpp"
#include "targetbench/synthetic.hpp"

namespace targetbench {

struct DatasetSource {
  bool is_synthetic = true;
  SyntheticSpec synthetic;
  std::string csv_path;
  CsvSchema schema;
  OutcomeDirection direction = OutcomeDirection::higher_is_better;
  std::optional<double> known_propensity;
};

struct RunConfig {
  DatasetSource source;
  SweepConfig sweep;
  std::size_t window = 200;  // kernel curve window
  std::string out_dir = "out";
};

// Strict JSON parse: unknown keys, malformed values, and out-of-range
// parameters are errors. Missing keys take the documented defaults.
RunConfig parse_run_config(const std::string& json_text);
RunConfig load_run_config(const std::string& path);

// The fully resolved configuration, serialized in the same JSON shape the
// parser accepts, so reloading it reproduces the run exactly.
std::string effective_config_text(const RunConfig& cfg);

// Generates or loads the configured dataset. Synthetic generation is seeded
// by the run seed; the ground truth is returned for synthetic sources.
std::pair<Dataset, std::optional<GroundTruth>> materialize_dataset(
    const RunConfig& cfg);

}  // namespace targetbench

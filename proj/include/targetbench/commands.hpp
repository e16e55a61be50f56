#pragma once

#include <string>
#include <vector>

#include "targetbench/config.hpp"

namespace targetbench {

// Each command materializes the configured dataset, runs its pipeline, and
// writes its artifacts under cfg.out_dir (created if missing). The returned
// list contains every file written, in the order it was written. All commands
// also emit effective_config.json, the fully resolved configuration that
// reproduces the run byte for byte.
std::vector<std::string> cmd_synth(const RunConfig& cfg);
std::vector<std::string> cmd_curve(const RunConfig& cfg);
std::vector<std::string> cmd_sweep(const RunConfig& cfg);
std::vector<std::string> cmd_alpha(const RunConfig& cfg);

} // namespace targetbench

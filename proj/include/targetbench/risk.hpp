#pragma once

#include <string>
#include <vector>

#include "targetbench/dataset.hpp"
#include "targetbench/learners.hpp"

namespace targetbench {

struct RiskScores {
  std::vector<double> b;        // baseline risk, higher = worse off
  std::vector<double> b_prime;  // percentile score in [0, 1], max risk -> 1
  double effect_sign = 1.0;     // benefit = effect_sign * (chi1 - chi0)
};

// Regressor for E[Y | X, W=0], fit on control rows only.
ModelPtr fit_risk_model(const Dataset& train, const LearnerSpec& spec);

// Applies the sign convention (predicted-good-outcome becomes negative risk,
// predicted-bad-outcome stays positive) and converts to percentile scores
// (rank - 1) / (n - 1) with average ranks on ties. A single row scores 0.5.
RiskScores score_risk(const Dataset& ds, const Model& model);

void write_risk_csv(const RiskScores& scores, const std::string& path);

}  // namespace targetbench

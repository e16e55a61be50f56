#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "targetbench/dataset.hpp"

namespace targetbench {

struct SyntheticSpec {
  std::size_t n = 1000;
  std::size_t d = 6;
  double noise_sd = 1.0;
  double treat_fraction = 0.5;
  double rho = 0.5;       // alignment between baseline risk and treatment effect
  double te_scale = 1.0;
  std::uint64_t seed = 1;
};

struct GroundTruth {
  std::vector<double> mu0;
  std::vector<double> mu1;
  std::vector<double> tau;  // mu1 - mu0, held exactly
};

// Linear randomized-trial generator with known potential outcomes.
//
//   X ~ N(0, I)                   mu0(x) = x . b0,  b0 = (1, 1/2, 0, ...)
//   tau(x) = te_scale * (rho * (-x . b0)/|b0| + sqrt(1-rho^2) * (x . b1)/|b1|)
//   with b1 = (0, 0, 1, 1/2, 0, ...) orthogonal to b0
//   W ~ Bernoulli(treat_fraction), independent of X
//   Y = mu0 + W * tau + noise_sd * N(0, 1)
//
// Positive rho makes low-mu0 (high-risk) rows benefit more; rho = 0 makes the
// effect independent of risk. Regeneration with the same spec is bit-identical.
std::pair<Dataset, GroundTruth> generate(const SyntheticSpec& spec);

// Sidecar file with one row per unit: mu0, mu1, tau.
void write_ground_truth_csv(const GroundTruth& gt, const std::string& path);

}  // namespace targetbench

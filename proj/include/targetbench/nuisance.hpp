#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "targetbench/dataset.hpp"
#include "targetbench/learners.hpp"

namespace targetbench {

enum class PropensityMode { estimated_clipped, uniform };

// Per-fold nuisance models. Each fold's models were trained only on rows
// outside that fold, so fold membership decides which models are out-of-sample
// for a given training row.
struct NuisanceFold {
  std::vector<std::size_t> rows;  // indices into the training dataset
  ModelPtr mu0;                   // outcome model fit on control rows
  ModelPtr mu1;                   // outcome model fit on treated rows
  ModelPtr pi;                    // probability-of-treatment model
};

struct CrossFitNuisances {
  std::vector<NuisanceFold> folds;
  PropensityMode propensity_mode = PropensityMode::estimated_clipped;
  double clip_lo = 0.02;
  double clip_hi = 0.98;
  std::size_t train_rows = 0;  // row count of the dataset the folds index into
};

struct PseudoOutcomes {
  std::vector<double> chi0;
  std::vector<double> chi1;
  std::vector<double> diff;     // chi1 - chi0
  std::vector<double> benefit;  // diff times the outcome's effect sign
};

enum class PseudoMode {
  within_fold,    // each row scored by the models that never saw it
  ensemble_mean,  // held-out rows scored by the mean over all fold models
};

// +1 when larger outcomes are better, -1 when smaller outcomes are better.
inline double effect_sign(OutcomeDirection dir) {
  return dir == OutcomeDirection::higher_is_better ? 1.0 : -1.0;
}

// Cross-fitted nuisance training: rows are dealt into n_folds random folds;
// each fold's mu0/mu1/pi are fit on the complementary rows (mu0 on control,
// mu1 on treated). With propensity_mode = uniform, pi is the constant treated
// fraction of the whole training split. Folds whose complement lacks an arm
// trigger a refold with a fresh permutation, up to 100 attempts.
CrossFitNuisances fit_crossfit(const Dataset& train,
                               const LearnerSpec& outcome_spec,
                               const LearnerSpec& propensity_spec,
                               std::size_t n_folds, PropensityMode mode,
                               std::uint64_t seed);

// Doubly robust scores
//   chi(A) = mu(X, A) + 1[W = A] * (Y - mu(X, A)) / (A*pi + (1-A)*(1-pi))
// with pi clipped to [clip_lo, clip_hi] in estimated_clipped mode.
// within_fold requires `target` to be the dataset the folds were fit on.
PseudoOutcomes pseudo_outcomes(const Dataset& target,
                               const CrossFitNuisances& nuis, PseudoMode mode);

// Mean of diff: the doubly robust average treatment effect estimate.
double ate_estimate(const PseudoOutcomes& po);

void write_pseudo_outcomes_csv(const PseudoOutcomes& po,
                               const std::string& path);

}  // namespace targetbench

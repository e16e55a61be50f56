#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "targetbench/dataset.hpp"
#include "targetbench/learners.hpp"
#include "targetbench/nuisance.hpp"
#include "targetbench/risk.hpp"
#include "targetbench/welfare.hpp"

namespace targetbench {

inline LearnerSpec default_propensity_spec() {
  LearnerSpec s;
  s.kind = LearnerKind::logistic;
  return s;
}

struct PipelineSpec {
  LearnerSpec outcome;
  LearnerSpec propensity = default_propensity_spec();
  std::size_t n_folds = 2;
  PropensityMode propensity_mode = PropensityMode::estimated_clipped;
  double clip_lo = 0.02;
  double clip_hi = 0.98;
};

// How Nash welfare establishes its utility floor of 1 before taking logs:
// shift every outcome by the same additive constant (default, preserves
// outcome differences) or rescale multiplicatively (requires strictly
// positive outcomes).
enum class NashScaling { additive, multiplicative };

struct SweepConfig {
  std::vector<double> k_values = {0.0};
  std::vector<PolicyKind> policies = {PolicyKind::risk,
                                      PolicyKind::treatment_effect,
                                      PolicyKind::random_policy};
  std::vector<WelfareSpec> welfare = {WelfareSpec{}};
  double budget = 0.2;
  TeMode te_mode = TeMode::predicted;
  std::size_t bootstrap_reps = 1000;
  double train_fraction = 0.5;
  PipelineSpec pipeline;
  LearnerSpec risk_learner;
  LearnerSpec cate_learner;
  NashScaling nash_scaling = NashScaling::additive;
  std::uint64_t seed = 1;
};

struct CellResult {
  std::string welfare;
  PolicyKind policy = PolicyKind::risk;
  double k = 0.0;
  double value = 0.0;
  double ci_lo = 0.0;
  double ci_hi = 0.0;
  std::size_t bootstrap_reps = 0;
};

struct ExperimentResult {
  std::string dataset;
  double budget = 0.2;
  std::uint64_t seed = 0;
  TeMode te_mode = TeMode::predicted;
  std::vector<CellResult> cells;  // ordered by (welfare, policy, k) config order
};

// Additive shift establishing a minimum outcome of 1 across both splits
// (zero when the minimum is already >= 1).
double nash_shift(const Dataset& train, const Dataset& eval);

// Copy of ds with Y replaced by log(Y + shift). Every shifted outcome must be
// positive.
Dataset log_outcomes(const Dataset& ds, double shift);

// Train/eval copies with outcomes floored at 1 and log-transformed, under the
// chosen scaling rule.
std::pair<Dataset, Dataset> nash_log_datasets(const Dataset& train,
                                              const Dataset& eval,
                                              NashScaling scaling);

// Value of a fixed assignment under Nash welfare: floor outcomes at 1, take
// logs, rerun the cross-fitted pseudo-outcome pipeline on the log scale, and
// average the selected rows' benefits (log-scale utilitarian).
double nash_policy_value(const Dataset& train, const Dataset& eval,
                         const PipelineSpec& pipe, std::uint64_t seed,
                         const Assignment& assign,
                         NashScaling scaling = NashScaling::additive);

// The k-sweep experiment. For each k the training split is biased by
// systematic removal, policies are rebuilt from the biased data, and every
// policy is scored on the untouched evaluation split's ground-truth benefits
// (cross-fitted pseudo-outcomes). The risk and random policies do not use
// treatment-effect information, so they are built once from the unbiased
// training split. Confidence intervals are percentile bootstrap over
// evaluation rows. Byte-identical across reruns and thread counts.
ExperimentResult sweep(const Dataset& ds, const SweepConfig& cfg);

struct AlphaRow {
  double k = 0.0;
  std::optional<double> alpha;
};

// Per-k threshold alpha at which weighted risk-based targeting catches up
// with weighted effect-based targeting on the evaluation split.
std::vector<AlphaRow> alpha_table(const Dataset& ds, const SweepConfig& cfg);

void write_result_json(const ExperimentResult& result, const std::string& path);
void write_result_csv(const ExperimentResult& result, const std::string& path);
void write_alpha_csv(const std::string& dataset, const std::vector<AlphaRow>& rows,
                     const std::string& path);

}  // namespace targetbench

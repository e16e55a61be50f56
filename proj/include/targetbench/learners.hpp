#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "targetbench/dataset.hpp"

namespace targetbench {

enum class LearnerKind { random_forest, ridge_linear, logistic };

std::string learner_kind_name(LearnerKind kind);
LearnerKind learner_kind_from_name(const std::string& name);

struct LearnerSpec {
  LearnerKind kind = LearnerKind::random_forest;
  std::size_t n_trees = 200;
  std::size_t max_depth = 0;  // 0 means unlimited
  std::size_t min_leaf = 5;
  double mtry_fraction = 1.0 / 3.0;  // fraction of features tried per split
  double ridge_lambda = 1e-3;
  std::uint64_t seed = 1;
};

// Immutable fitted model. Predictions are pure functions of the input rows.
class Model {
 public:
  virtual ~Model() = default;
  virtual std::vector<double> predict(const Matrix& X) const = 0;
  virtual std::string kind() const = 0;
  std::size_t dim() const { return dim_; }

 protected:
  explicit Model(std::size_t dim) : dim_(dim) {}
  void check_input(const Matrix& X) const;

 private:
  std::size_t dim_;
};

using ModelPtr = std::shared_ptr<const Model>;

// Regression fit. random_forest bags CART trees (variance-reduction splits,
// mean leaves, bootstrap per tree, feature subsampling per split);
// ridge_linear solves penalized least squares with an unpenalized intercept
// (lambda = 0 reduces to OLS). Deterministic given spec.seed, including under
// parallel tree fitting.
ModelPtr fit_regressor(const Matrix& X, const std::vector<double>& y,
                       const LearnerSpec& spec);

// Probability-of-treatment fit; outputs live in [1e-6, 1 - 1e-6].
// random_forest reuses the regression machinery on 0/1 targets (class-fraction
// leaves); logistic runs ridge-regularized IRLS (tolerance 1e-8, at most 500
// iterations, non-convergence warns on stderr but still returns the fit).
ModelPtr fit_propensity(const Matrix& X, const std::vector<int>& w,
                        const LearnerSpec& spec);

// Fixed-output model: predicts `value` for every row. Useful as a baseline or
// as a deliberately misspecified nuisance in robustness experiments.
ModelPtr make_constant_model(double value, std::size_t dim);

}  // namespace targetbench

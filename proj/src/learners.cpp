#include "targetbench/learners.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <iostream>
#include <numeric>

#include "targetbench/parallel.hpp"
#include "targetbench/rng.hpp"

namespace targetbench {

std::string learner_kind_name(LearnerKind kind) {
  switch (kind) {
    case LearnerKind::random_forest: return "random_forest";
    case LearnerKind::ridge_linear: return "ridge_linear";
    case LearnerKind::logistic: return "logistic";
  }
  fail("unknown learner kind");
}

LearnerKind learner_kind_from_name(const std::string& name) {
  if (name == "random_forest") return LearnerKind::random_forest;
  if (name == "ridge_linear") return LearnerKind::ridge_linear;
  if (name == "logistic") return LearnerKind::logistic;
  fail("unknown learner kind: '" + name + "'");
}

void Model::check_input(const Matrix& X) const {
  if (X.rows > 0 && X.cols != dim_)
    fail("predict: input has " + std::to_string(X.cols) +
         " features, model was trained with " + std::to_string(dim_));
}

namespace {

void validate_spec(const LearnerSpec& spec) {
  if (spec.n_trees < 1) fail("learner spec: n_trees must be positive");
  if (spec.min_leaf < 1) fail("learner spec: min_leaf must be positive");
  if (!(spec.mtry_fraction > 0.0 && spec.mtry_fraction <= 1.0))
    fail("learner spec: mtry_fraction must lie in (0, 1]");
  if (spec.ridge_lambda < 0.0) fail("learner spec: ridge_lambda must be >= 0");
}

void check_finite(const Matrix& X, const std::vector<double>& y) {
  for (double v : X.data)
    if (!std::isfinite(v)) fail("fit: non-finite value in features");
  for (double v : y)
    if (!std::isfinite(v)) fail("fit: non-finite value in targets");
}

// ---------------------------------------------------------------------------
// Random forest

struct TreeNode {
  std::int32_t feature = -1;  // -1 marks a leaf
  double value = 0.0;         // threshold for internal nodes, mean for leaves
  std::uint32_t left = 0;
  std::uint32_t right = 0;
};

struct Tree {
  std::vector<TreeNode> nodes;

  double predict_row(const Matrix& X, std::size_t row) const {
    std::uint32_t at = 0;
    while (nodes[at].feature >= 0) {
      const auto& nd = nodes[at];
      at = X(row, static_cast<std::size_t>(nd.feature)) <= nd.value ? nd.left
                                                                    : nd.right;
    }
    return nodes[at].value;
  }
};

// Builder keeping one index list per feature, each sorted by that feature's
// value over the bootstrap sample. Splits partition every list stably, so the
// sorted order survives and each node's split scan is linear.
class TreeBuilder {
 public:
  TreeBuilder(const Matrix& X, const std::vector<double>& y,
              const LearnerSpec& spec, std::uint64_t seed)
      : X_(X), y_(y), spec_(spec), rng_(seed) {
    const std::size_t n = X.rows;
    const std::size_t d = X.cols;
    mtry_ = static_cast<std::size_t>(
        std::ceil(spec.mtry_fraction * static_cast<double>(d) - 1e-9));
    mtry_ = std::min(std::max<std::size_t>(mtry_, 1), d);

    std::vector<std::size_t> sample(n);
    for (std::size_t i = 0; i < n; ++i)
      sample[i] = static_cast<std::size_t>(rng_.uniform_int(n));

    by_feature_.resize(d);
    for (std::size_t f = 0; f < d; ++f) {
      by_feature_[f] = sample;
      std::stable_sort(by_feature_[f].begin(), by_feature_[f].end(),
                       [&](std::size_t a, std::size_t b) {
                         return X(a, f) < X(b, f);
                       });
    }
    side_.assign(n, 0);
    scratch_.resize(n);
    feature_pool_.resize(d);
    std::iota(feature_pool_.begin(), feature_pool_.end(), std::size_t{0});
  }

  Tree build() {
    Tree tree;
    build_node(tree, 0, by_feature_[0].size(), 0);
    return tree;
  }

 private:
  std::uint32_t build_node(Tree& tree, std::size_t lo, std::size_t hi,
                           std::size_t depth) {
    const std::size_t k = hi - lo;
    const std::uint32_t id = static_cast<std::uint32_t>(tree.nodes.size());
    tree.nodes.emplace_back();

    double sum = 0.0;
    bool all_equal = true;
    const double first_y = y_[by_feature_[0][lo]];
    for (std::size_t i = lo; i < hi; ++i) {
      const double yi = y_[by_feature_[0][i]];
      sum += yi;
      if (yi != first_y) all_equal = false;
    }

    const bool depth_capped = spec_.max_depth > 0 && depth >= spec_.max_depth;
    if (all_equal || k < 2 * spec_.min_leaf || depth_capped) {
      tree.nodes[id].value = all_equal ? first_y : sum / static_cast<double>(k);
      return id;
    }

    // Pick mtry features without replacement, then scan each candidate's
    // sorted list for the variance-reducing split boundary.
    for (std::size_t i = 0; i < mtry_; ++i) {
      const std::size_t j = i + static_cast<std::size_t>(
                                    rng_.uniform_int(feature_pool_.size() - i));
      std::swap(feature_pool_[i], feature_pool_[j]);
    }

    double best_gain = 0.0;
    std::size_t best_feature = 0;
    double best_threshold = 0.0;
    bool found = false;
    const double total_term = sum * sum / static_cast<double>(k);

    for (std::size_t fi = 0; fi < mtry_; ++fi) {
      const std::size_t f = feature_pool_[fi];
      const auto& order = by_feature_[f];
      double left_sum = 0.0;
      for (std::size_t i = lo; i + 1 < hi; ++i) {
        left_sum += y_[order[i]];
        const double xv = X_(order[i], f);
        const double xn = X_(order[i + 1], f);
        if (xv == xn) continue;
        const std::size_t n_left = i - lo + 1;
        const std::size_t n_right = k - n_left;
        if (n_left < spec_.min_leaf || n_right < spec_.min_leaf) continue;
        const double right_sum = sum - left_sum;
        const double gain = left_sum * left_sum / static_cast<double>(n_left) +
                            right_sum * right_sum / static_cast<double>(n_right) -
                            total_term;
        if (gain > best_gain) {
          best_gain = gain;
          best_feature = f;
          best_threshold = 0.5 * (xv + xn);
          found = true;
        }
      }
    }

    if (!found) {
      tree.nodes[id].value = sum / static_cast<double>(k);
      return id;
    }

    for (std::size_t i = lo; i < hi; ++i) {
      const std::size_t row = by_feature_[0][i];
      side_[row] = X_(row, best_feature) <= best_threshold ? 1 : 0;
    }
    std::size_t n_left = 0;
    for (std::size_t i = lo; i < hi; ++i)
      if (side_[by_feature_[0][i]]) ++n_left;

    for (auto& order : by_feature_) {
      std::size_t at_left = lo;
      std::size_t at_right = 0;
      for (std::size_t i = lo; i < hi; ++i) {
        const std::size_t row = order[i];
        if (side_[row]) order[at_left++] = row;
        else scratch_[at_right++] = row;
      }
      std::copy(scratch_.begin(),
                scratch_.begin() + static_cast<std::ptrdiff_t>(at_right),
                order.begin() + static_cast<std::ptrdiff_t>(at_left));
    }

    tree.nodes[id].feature = static_cast<std::int32_t>(best_feature);
    tree.nodes[id].value = best_threshold;
    const std::uint32_t left = build_node(tree, lo, lo + n_left, depth + 1);
    const std::uint32_t right = build_node(tree, lo + n_left, hi, depth + 1);
    tree.nodes[id].left = left;
    tree.nodes[id].right = right;
    return id;
  }

  const Matrix& X_;
  const std::vector<double>& y_;
  const LearnerSpec& spec_;
  RandomStream rng_;
  std::size_t mtry_ = 1;
  std::vector<std::vector<std::size_t>> by_feature_;
  std::vector<std::uint8_t> side_;
  std::vector<std::size_t> scratch_;
  std::vector<std::size_t> feature_pool_;
};

class ForestModel : public Model {
 public:
  ForestModel(const Matrix& X, const std::vector<double>& y,
              const LearnerSpec& spec, bool classify)
      : Model(X.cols), classify_(classify) {
    trees_.resize(spec.n_trees);
    parallel_for(0, spec.n_trees, [&](std::size_t t) {
      TreeBuilder builder(X, y, spec, derive_seed(spec.seed, seed_tag::tree, t));
      trees_[t] = builder.build();
    });
  }

  std::vector<double> predict(const Matrix& X) const override {
    check_input(X);
    std::vector<double> out(X.rows, 0.0);
    parallel_for(0, X.rows, [&](std::size_t i) {
      double s = 0.0;
      for (const auto& tree : trees_) s += tree.predict_row(X, i);
      double v = s / static_cast<double>(trees_.size());
      if (classify_) v = std::clamp(v, 1e-6, 1.0 - 1e-6);
      out[i] = v;
    });
    return out;
  }

  std::string kind() const override { return "random_forest"; }

 private:
  std::vector<Tree> trees_;
  bool classify_;
};

// ---------------------------------------------------------------------------
// Linear models

using EigenRowMajor =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

Eigen::MatrixXd design_matrix(const Matrix& X) {
  Eigen::MatrixXd A(X.rows, X.cols + 1);
  A.col(0).setOnes();
  if (X.cols > 0)
    A.rightCols(X.cols) = Eigen::Map<const EigenRowMajor>(
        X.data.data(), static_cast<Eigen::Index>(X.rows),
        static_cast<Eigen::Index>(X.cols));
  return A;
}

class LinearModel : public Model {
 public:
  LinearModel(std::size_t dim, Eigen::VectorXd beta, bool logistic)
      : Model(dim), beta_(std::move(beta)), logistic_(logistic) {}

  std::vector<double> predict(const Matrix& X) const override {
    check_input(X);
    std::vector<double> out(X.rows);
    for (std::size_t i = 0; i < X.rows; ++i) {
      double v = beta_[0];
      for (std::size_t j = 0; j < X.cols; ++j)
        v += beta_[static_cast<Eigen::Index>(j + 1)] * X(i, j);
      if (logistic_) {
        v = 1.0 / (1.0 + std::exp(-v));
        v = std::clamp(v, 1e-6, 1.0 - 1e-6);
      }
      out[i] = v;
    }
    return out;
  }

  std::string kind() const override {
    return logistic_ ? "logistic" : "ridge_linear";
  }

 private:
  Eigen::VectorXd beta_;
  bool logistic_;
};

ModelPtr fit_ridge(const Matrix& X, const std::vector<double>& y,
                   const LearnerSpec& spec) {
  const auto n = static_cast<Eigen::Index>(X.rows);
  const auto d = static_cast<Eigen::Index>(X.cols);
  Eigen::MatrixXd A = design_matrix(X);
  Eigen::VectorXd b = Eigen::Map<const Eigen::VectorXd>(y.data(), n);

  // Penalty rows sqrt(lambda) * e_j for each feature coefficient keep the
  // intercept unpenalized and make lambda = 0 plain least squares.
  Eigen::MatrixXd stacked(n + d, d + 1);
  Eigen::VectorXd rhs(n + d);
  stacked.topRows(n) = A;
  rhs.head(n) = b;
  stacked.bottomRows(d).setZero();
  rhs.tail(d).setZero();
  const double sq = std::sqrt(spec.ridge_lambda);
  for (Eigen::Index j = 0; j < d; ++j) stacked(n + j, j + 1) = sq;

  Eigen::VectorXd beta = stacked.colPivHouseholderQr().solve(rhs);
  return std::make_shared<LinearModel>(X.cols, std::move(beta), false);
}

ModelPtr fit_logistic(const Matrix& X, const std::vector<double>& y,
                      const LearnerSpec& spec) {
  const auto n = static_cast<Eigen::Index>(X.rows);
  const auto d = static_cast<Eigen::Index>(X.cols);
  Eigen::MatrixXd A = design_matrix(X);
  Eigen::VectorXd target = Eigen::Map<const Eigen::VectorXd>(y.data(), n);

  Eigen::VectorXd beta = Eigen::VectorXd::Zero(d + 1);
  Eigen::VectorXd penalty = Eigen::VectorXd::Constant(d + 1, spec.ridge_lambda);
  penalty[0] = 0.0;  // intercept stays unpenalized

  constexpr int kMaxIter = 500;
  constexpr double kTol = 1e-8;
  bool converged = false;
  for (int iter = 0; iter < kMaxIter; ++iter) {
    Eigen::VectorXd eta = A * beta;
    Eigen::VectorXd p = (1.0 + (-eta.array()).exp()).inverse();
    Eigen::VectorXd r =
        (p.array() * (1.0 - p.array())).max(1e-10).matrix();
    Eigen::MatrixXd h = A.transpose() * r.asDiagonal() * A;
    h.diagonal() += penalty;
    Eigen::VectorXd grad =
        A.transpose() * (target - p) - penalty.cwiseProduct(beta);
    Eigen::VectorXd step = h.ldlt().solve(grad);
    beta += step;
    if (step.cwiseAbs().maxCoeff() < kTol) {
      converged = true;
      break;
    }
  }
  if (!converged)
    std::cerr << "warning: logistic fit did not converge within " << kMaxIter
              << " iterations\n";
  return std::make_shared<LinearModel>(X.cols, std::move(beta), true);
}

class ConstantModel : public Model {
 public:
  ConstantModel(double value, std::size_t dim) : Model(dim), value_(value) {}

  std::vector<double> predict(const Matrix& X) const override {
    check_input(X);
    return std::vector<double>(X.rows, value_);
  }

  std::string kind() const override { return "constant"; }

 private:
  double value_;
};

}  // namespace

ModelPtr fit_regressor(const Matrix& X, const std::vector<double>& y,
                       const LearnerSpec& spec) {
  validate_spec(spec);
  if (X.rows != y.size()) fail("fit_regressor: X and y row counts differ");
  if (X.rows < 2 * spec.min_leaf)
    fail("fit_regressor: needs at least " + std::to_string(2 * spec.min_leaf) +
         " rows, got " + std::to_string(X.rows));
  check_finite(X, y);
  switch (spec.kind) {
    case LearnerKind::random_forest:
      return std::make_shared<ForestModel>(X, y, spec, false);
    case LearnerKind::ridge_linear:
      return fit_ridge(X, y, spec);
    case LearnerKind::logistic:
      fail("fit_regressor: logistic is a propensity learner");
  }
  fail("unknown learner kind");
}

ModelPtr fit_propensity(const Matrix& X, const std::vector<int>& w,
                        const LearnerSpec& spec) {
  validate_spec(spec);
  if (X.rows != w.size()) fail("fit_propensity: X and w row counts differ");
  if (X.rows == 0) fail("fit_propensity: empty input");
  bool any0 = false, any1 = false;
  std::vector<double> target(w.size());
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (w[i] == 0) any0 = true;
    else if (w[i] == 1) any1 = true;
    else fail("fit_propensity: treatment values must be 0 or 1");
    target[i] = static_cast<double>(w[i]);
  }
  if (!any0 || !any1)
    fail("fit_propensity: both treatment classes must be present");
  check_finite(X, target);
  switch (spec.kind) {
    case LearnerKind::random_forest:
      return std::make_shared<ForestModel>(X, target, spec, true);
    case LearnerKind::logistic:
      return fit_logistic(X, target, spec);
    case LearnerKind::ridge_linear:
      fail("fit_propensity: ridge_linear is a regression learner");
  }
  fail("unknown learner kind");
}

ModelPtr make_constant_model(double value, std::size_t dim) {
  return std::make_shared<ConstantModel>(value, dim);
}

}  // namespace targetbench

#include "targetbench/nuisance.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

#include "targetbench/format.hpp"
#include "targetbench/rng.hpp"

namespace targetbench {

namespace {

std::vector<std::size_t> rows_where(const Dataset& ds,
                                    const std::vector<std::size_t>& subset,
                                    int arm) {
  std::vector<std::size_t> out;
  for (std::size_t i : subset)
    if (ds.W[i] == arm) out.push_back(i);
  return out;
}

Matrix gather_X(const Dataset& ds, const std::vector<std::size_t>& rows) {
  Matrix out(rows.size(), ds.d());
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < ds.d(); ++j) out(i, j) = ds.X(rows[i], j);
  return out;
}

std::vector<double> gather_Y(const Dataset& ds,
                             const std::vector<std::size_t>& rows) {
  std::vector<double> out(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) out[i] = ds.Y[rows[i]];
  return out;
}

}  // namespace

CrossFitNuisances fit_crossfit(const Dataset& train,
                               const LearnerSpec& outcome_spec,
                               const LearnerSpec& propensity_spec,
                               std::size_t n_folds, PropensityMode mode,
                               std::uint64_t seed) {
  train.require_estimable();
  if (n_folds < 2) fail("fit_crossfit: n_folds must be at least 2");
  const std::size_t n = train.n();
  if (n < n_folds) fail("fit_crossfit: more folds than rows");

  RandomStream fold_rng(derive_seed(seed, seed_tag::folds));
  std::vector<std::size_t> perm(n);
  std::vector<std::vector<std::size_t>> fold_rows;

  bool ok = false;
  for (int attempt = 0; attempt < 100 && !ok; ++attempt) {
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    fold_rng.shuffle(perm);
    fold_rows.assign(n_folds, {});
    std::size_t at = 0;
    for (std::size_t f = 0; f < n_folds; ++f) {
      std::size_t size = n / n_folds + (f < n % n_folds ? 1 : 0);
      fold_rows[f].assign(perm.begin() + static_cast<std::ptrdiff_t>(at),
                          perm.begin() + static_cast<std::ptrdiff_t>(at + size));
      std::sort(fold_rows[f].begin(), fold_rows[f].end());
      at += size;
    }
    ok = true;
    for (std::size_t f = 0; f < n_folds && ok; ++f) {
      bool treated = false, control = false;
      for (std::size_t g = 0; g < n_folds; ++g) {
        if (g == f) continue;
        for (std::size_t i : fold_rows[g]) {
          if (train.W[i] == 1) treated = true;
          else control = true;
        }
      }
      if (!treated || !control) ok = false;
    }
  }
  if (!ok)
    fail("fit_crossfit: could not form folds whose complements hold both arms");

  double uniform_pi = 0.0;
  if (mode == PropensityMode::uniform)
    uniform_pi = static_cast<double>(train.treated_count()) /
                 static_cast<double>(n);

  CrossFitNuisances nuis;
  nuis.propensity_mode = mode;
  nuis.train_rows = n;
  nuis.folds.resize(n_folds);
  for (std::size_t f = 0; f < n_folds; ++f) {
    std::vector<std::size_t> complement;
    for (std::size_t g = 0; g < n_folds; ++g)
      if (g != f)
        complement.insert(complement.end(), fold_rows[g].begin(),
                          fold_rows[g].end());
    std::sort(complement.begin(), complement.end());

    const auto control = rows_where(train, complement, 0);
    const auto treated = rows_where(train, complement, 1);

    LearnerSpec mu0_spec = outcome_spec;
    mu0_spec.seed = derive_seed(seed, seed_tag::mu0, f);
    LearnerSpec mu1_spec = outcome_spec;
    mu1_spec.seed = derive_seed(seed, seed_tag::mu1, f);

    NuisanceFold& fold = nuis.folds[f];
    fold.rows = fold_rows[f];
    fold.mu0 = fit_regressor(gather_X(train, control), gather_Y(train, control),
                             mu0_spec);
    fold.mu1 = fit_regressor(gather_X(train, treated), gather_Y(train, treated),
                             mu1_spec);
    if (mode == PropensityMode::uniform) {
      fold.pi = make_constant_model(uniform_pi, train.d());
    } else {
      LearnerSpec pi_spec = propensity_spec;
      pi_spec.seed = derive_seed(seed, seed_tag::propensity, f);
      std::vector<int> w(complement.size());
      for (std::size_t i = 0; i < complement.size(); ++i)
        w[i] = train.W[complement[i]];
      fold.pi = fit_propensity(gather_X(train, complement), w, pi_spec);
    }
  }
  return nuis;
}

namespace {

// chi0/chi1 for every target row under one fold's models.
void fold_chi(const Dataset& target, const CrossFitNuisances& nuis,
              const NuisanceFold& fold, std::vector<double>& chi0,
              std::vector<double>& chi1) {
  const std::size_t m = target.n();
  const auto mu0 = fold.mu0->predict(target.X);
  const auto mu1 = fold.mu1->predict(target.X);
  auto pi = fold.pi->predict(target.X);
  if (nuis.propensity_mode == PropensityMode::estimated_clipped)
    for (double& p : pi) p = std::clamp(p, nuis.clip_lo, nuis.clip_hi);

  chi0.resize(m);
  chi1.resize(m);
  for (std::size_t i = 0; i < m; ++i) {
    const double y = target.Y[i];
    if (target.W[i] == 1) {
      chi1[i] = mu1[i] + (y - mu1[i]) / pi[i];
      chi0[i] = mu0[i];
    } else {
      chi1[i] = mu1[i];
      chi0[i] = mu0[i] + (y - mu0[i]) / (1.0 - pi[i]);
    }
  }
}

}  // namespace

PseudoOutcomes pseudo_outcomes(const Dataset& target,
                               const CrossFitNuisances& nuis, PseudoMode mode) {
  if (nuis.folds.empty()) fail("pseudo_outcomes: no fitted folds");
  const std::size_t m = target.n();
  PseudoOutcomes po;
  po.chi0.assign(m, 0.0);
  po.chi1.assign(m, 0.0);

  if (mode == PseudoMode::within_fold) {
    if (m != nuis.train_rows)
      fail("pseudo_outcomes: within_fold needs the dataset the folds were fit "
           "on");
    std::vector<std::size_t> fold_of(m, nuis.folds.size());
    for (std::size_t f = 0; f < nuis.folds.size(); ++f)
      for (std::size_t i : nuis.folds[f].rows) {
        if (i >= m || fold_of[i] != nuis.folds.size())
          fail("pseudo_outcomes: fold row sets do not partition the rows");
        fold_of[i] = f;
      }
    for (std::size_t i = 0; i < m; ++i)
      if (fold_of[i] == nuis.folds.size())
        fail("pseudo_outcomes: fold row sets do not partition the rows");

    for (std::size_t f = 0; f < nuis.folds.size(); ++f) {
      const auto& rows = nuis.folds[f].rows;
      const Dataset part = target.subset(rows);
      std::vector<double> c0, c1;
      fold_chi(part, nuis, nuis.folds[f], c0, c1);
      for (std::size_t i = 0; i < rows.size(); ++i) {
        po.chi0[rows[i]] = c0[i];
        po.chi1[rows[i]] = c1[i];
      }
    }
  } else {
    for (const auto& fold : nuis.folds) {
      std::vector<double> c0, c1;
      fold_chi(target, nuis, fold, c0, c1);
      for (std::size_t i = 0; i < m; ++i) {
        po.chi0[i] += c0[i];
        po.chi1[i] += c1[i];
      }
    }
    const double f = static_cast<double>(nuis.folds.size());
    for (std::size_t i = 0; i < m; ++i) {
      po.chi0[i] /= f;
      po.chi1[i] /= f;
    }
  }

  const double sign = effect_sign(target.outcome_direction);
  po.diff.resize(m);
  po.benefit.resize(m);
  for (std::size_t i = 0; i < m; ++i) {
    po.diff[i] = po.chi1[i] - po.chi0[i];
    po.benefit[i] = po.diff[i] * sign;
    if (!std::isfinite(po.diff[i]))
      fail("pseudo_outcomes: non-finite score at row " + std::to_string(i));
  }
  return po;
}

double ate_estimate(const PseudoOutcomes& po) {
  if (po.diff.empty()) fail("ate_estimate: empty pseudo-outcomes");
  double s = 0.0;
  for (double v : po.diff) s += v;
  return s / static_cast<double>(po.diff.size());
}

void write_pseudo_outcomes_csv(const PseudoOutcomes& po,
                               const std::string& path) {
  std::ofstream out(path);
  if (!out) fail("cannot open file for writing: " + path);
  out << "row,chi0,chi1,diff,benefit\n";
  for (std::size_t i = 0; i < po.diff.size(); ++i) {
    out << i << ',' << format_double(po.chi0[i]) << ','
        << format_double(po.chi1[i]) << ',' << format_double(po.diff[i]) << ','
        << format_double(po.benefit[i]) << '\n';
  }
  if (!out) fail("failed writing pseudo-outcome CSV: " + path);
}

}  // namespace targetbench

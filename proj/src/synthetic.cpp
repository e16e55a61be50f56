#include "targetbench/synthetic.hpp"

#include <cmath>
#include <fstream>

#include "targetbench/format.hpp"
#include "targetbench/rng.hpp"

namespace targetbench {

std::pair<Dataset, GroundTruth> generate(const SyntheticSpec& spec) {
  if (spec.n < 1) fail("synthetic spec: n must be at least 1");
  if (spec.d < 2) fail("synthetic spec: d must be at least 2");
  if (spec.noise_sd < 0.0) fail("synthetic spec: noise_sd must be >= 0");
  if (!(spec.treat_fraction > 0.0 && spec.treat_fraction < 1.0))
    fail("synthetic spec: treat_fraction must lie in (0, 1)");
  if (spec.rho < -1.0 || spec.rho > 1.0)
    fail("synthetic spec: rho must lie in [-1, 1]");
  if (spec.te_scale < 0.0) fail("synthetic spec: te_scale must be >= 0");
  const bool needs_b1 = spec.rho != 1.0 && spec.rho != -1.0;
  if (needs_b1 && spec.d < 4)
    fail("synthetic spec: d must be at least 4 unless rho is -1 or 1");

  const double norm = std::sqrt(1.25);  // |b0| = |b1| = sqrt(1 + 1/4)
  const double cross = spec.te_scale * spec.rho / norm;
  const double ortho =
      spec.te_scale * std::sqrt(std::max(0.0, 1.0 - spec.rho * spec.rho)) / norm;

  Dataset ds;
  ds.name = "synthetic";
  ds.outcome_direction = OutcomeDirection::higher_is_better;
  ds.known_propensity = spec.treat_fraction;
  ds.X = Matrix(spec.n, spec.d);
  ds.W.resize(spec.n);
  ds.Y.resize(spec.n);
  ds.feature_names.reserve(spec.d);
  for (std::size_t j = 0; j < spec.d; ++j)
    ds.feature_names.push_back("x" + std::to_string(j));

  GroundTruth gt;
  gt.mu0.resize(spec.n);
  gt.mu1.resize(spec.n);
  gt.tau.resize(spec.n);

  RandomStream x_rng(derive_seed(spec.seed, seed_tag::synthetic_x));
  RandomStream w_rng(derive_seed(spec.seed, seed_tag::synthetic_w));
  RandomStream e_rng(derive_seed(spec.seed, seed_tag::synthetic_noise));

  for (std::size_t i = 0; i < spec.n; ++i) {
    for (std::size_t j = 0; j < spec.d; ++j) ds.X(i, j) = x_rng.normal();
    const double xb0 = ds.X(i, 0) + 0.5 * ds.X(i, 1);
    const double xb1 =
        spec.d >= 4 ? ds.X(i, 2) + 0.5 * ds.X(i, 3) : 0.0;
    const double mu0 = xb0;
    const double tau_formula = cross * (-xb0) + ortho * xb1;
    const double mu1 = mu0 + tau_formula;
    gt.mu0[i] = mu0;
    gt.mu1[i] = mu1;
    gt.tau[i] = mu1 - mu0;  // exact by construction

    ds.W[i] = w_rng.bernoulli(spec.treat_fraction) ? 1 : 0;
    const double eps = spec.noise_sd == 0.0 ? 0.0 : spec.noise_sd * e_rng.normal();
    ds.Y[i] = mu0 + static_cast<double>(ds.W[i]) * gt.tau[i] + eps;
  }
  return {std::move(ds), std::move(gt)};
}

void write_ground_truth_csv(const GroundTruth& gt, const std::string& path) {
  std::ofstream out(path);
  if (!out) fail("cannot open file for writing: " + path);
  out << "mu0,mu1,tau\n";
  for (std::size_t i = 0; i < gt.mu0.size(); ++i) {
    out << format_double(gt.mu0[i]) << ',' << format_double(gt.mu1[i]) << ','
        << format_double(gt.tau[i]) << '\n';
  }
  if (!out) fail("failed writing ground truth CSV: " + path);
}

}  // namespace targetbench

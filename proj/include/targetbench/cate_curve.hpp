#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "targetbench/dataset.hpp"
#include "targetbench/learners.hpp"
#include "targetbench/nuisance.hpp"

namespace targetbench {

// Second-stage effect model: features regressed on pseudo-outcome
// differences, never on raw outcomes.
struct CateModel {
  ModelPtr model;
  std::string provenance;  // note on which nuisances/split produced the targets
};

// One point per input row, sorted ascending by risk.
struct CurveEstimate {
  std::vector<double> b;
  std::vector<double> tau_hat;
  std::vector<double> sigma;  // adaptive bandwidth used at each point
  std::vector<double> ci_lo;
  std::vector<double> ci_hi;
};

struct KernelPoint {
  double tau_hat = 0.0;
  double ci_lo = 0.0;
  double ci_hi = 0.0;
};

struct CurveSummary {
  double significant_fraction = 0.0;  // points whose 95% band sits above zero
  double trend_spearman = 0.0;        // rank correlation of risk vs estimate
};

CateModel fit_cate(const Matrix& X, const PseudoOutcomes& po,
                   const LearnerSpec& spec, std::string provenance = "");

// Gaussian-kernel estimate at one location with an explicit bandwidth:
//   tau_hat = sum K_j tau_j / sum K_j,   K_j = exp(-((b_j - center)/sigma)^2/2)
//   CI      = tau_hat -+ 1.96 * sqrt( sum K_j (tau_j - tau_hat)^2 / (sum K_j)^2 )
// sigma = 0 averages only the rows with b_j == center.
KernelPoint kernel_smooth_at(const std::vector<double>& b,
                             const std::vector<double>& tau, double center,
                             double sigma);

// Smoothed effect-versus-risk curve evaluated at every data point, with the
// adaptive bandwidth sigma_i = (b[i + ceil(w/2)] - b[i - (ceil(w/2) - 1)]) / 2
// (indices clamped at the ends) and pointwise 95% bands.
CurveEstimate kernel_curve(const std::vector<double>& b,
                           const std::vector<double>& tau,
                           std::size_t window = 200);

CurveSummary curve_significance_summary(const CurveEstimate& curve);

// Columns: b, tau_hat, sigma, ci_lo, ci_hi.
void write_curve_csv(const CurveEstimate& curve, const std::string& path);

}  // namespace targetbench

#include "targetbench/cate_curve.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

#include "targetbench/format.hpp"
#include "targetbench/parallel.hpp"
#include "targetbench/stats.hpp"

namespace targetbench {

CateModel fit_cate(const Matrix& X, const PseudoOutcomes& po,
                   const LearnerSpec& spec, std::string provenance) {
  if (X.rows != po.diff.size()) fail("fit_cate: feature and target sizes differ");
  CateModel out;
  out.model = fit_regressor(X, po.diff, spec);
  out.provenance = std::move(provenance);
  return out;
}

KernelPoint kernel_smooth_at(const std::vector<double>& b,
                             const std::vector<double>& tau, double center,
                             double sigma) {
  if (b.size() != tau.size()) fail("kernel_smooth_at: size mismatch");
  if (b.empty()) fail("kernel_smooth_at: empty input");
  if (sigma < 0.0) fail("kernel_smooth_at: negative bandwidth");

  KernelPoint pt;
  if (sigma == 0.0) {
    // Degenerate bandwidth: average exactly the rows tied with the center.
    double sum = 0.0;
    std::size_t count = 0;
    for (std::size_t j = 0; j < b.size(); ++j) {
      if (b[j] == center) {
        sum += tau[j];
        ++count;
      }
    }
    if (count == 0) fail("kernel_smooth_at: zero bandwidth away from any point");
    pt.tau_hat = sum / static_cast<double>(count);
    double ss = 0.0;
    for (std::size_t j = 0; j < b.size(); ++j)
      if (b[j] == center) ss += (tau[j] - pt.tau_hat) * (tau[j] - pt.tau_hat);
    const double var = ss / (static_cast<double>(count) * static_cast<double>(count));
    const double half = 1.96 * std::sqrt(var);
    pt.ci_lo = pt.tau_hat - half;
    pt.ci_hi = pt.tau_hat + half;
    return pt;
  }

  double wsum = 0.0;
  double wtau = 0.0;
  for (std::size_t j = 0; j < b.size(); ++j) {
    const double u = (b[j] - center) / sigma;
    const double k = std::exp(-0.5 * u * u);
    wsum += k;
    wtau += k * tau[j];
  }
  pt.tau_hat = wtau / wsum;
  double wss = 0.0;
  for (std::size_t j = 0; j < b.size(); ++j) {
    const double u = (b[j] - center) / sigma;
    const double k = std::exp(-0.5 * u * u);
    wss += k * (tau[j] - pt.tau_hat) * (tau[j] - pt.tau_hat);
  }
  const double var = wss / (wsum * wsum);
  const double half = 1.96 * std::sqrt(var);
  pt.ci_lo = pt.tau_hat - half;
  pt.ci_hi = pt.tau_hat + half;
  return pt;
}

CurveEstimate kernel_curve(const std::vector<double>& b,
                           const std::vector<double>& tau, std::size_t window) {
  if (b.size() != tau.size()) fail("kernel_curve: size mismatch");
  if (b.size() < 2) fail("kernel_curve: needs at least 2 points");
  if (window < 2) fail("kernel_curve: window must be at least 2");
  const std::size_t n = b.size();

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t c) { return b[a] < b[c]; });

  CurveEstimate curve;
  curve.b.resize(n);
  curve.tau_hat.resize(n);
  curve.sigma.resize(n);
  curve.ci_lo.resize(n);
  curve.ci_hi.resize(n);
  std::vector<double> tau_sorted(n);
  for (std::size_t i = 0; i < n; ++i) {
    curve.b[i] = b[order[i]];
    tau_sorted[i] = tau[order[i]];
  }

  const std::size_t hi_off = (window + 1) / 2;      // ceil(w/2)
  const std::size_t lo_off = hi_off - 1;
  parallel_for(0, n, [&](std::size_t i) {
    const std::size_t hi = std::min(i + hi_off, n - 1);
    const std::size_t lo = i > lo_off ? i - lo_off : 0;
    curve.sigma[i] = 0.5 * (curve.b[hi] - curve.b[lo]);
    const KernelPoint pt =
        kernel_smooth_at(curve.b, tau_sorted, curve.b[i], curve.sigma[i]);
    curve.tau_hat[i] = pt.tau_hat;
    curve.ci_lo[i] = pt.ci_lo;
    curve.ci_hi[i] = pt.ci_hi;
  });
  return curve;
}

CurveSummary curve_significance_summary(const CurveEstimate& curve) {
  if (curve.b.empty()) fail("curve_significance_summary: empty curve");
  CurveSummary s;
  std::size_t above = 0;
  for (double lo : curve.ci_lo)
    if (lo > 0.0) ++above;
  s.significant_fraction =
      static_cast<double>(above) / static_cast<double>(curve.b.size());
  s.trend_spearman = spearman(curve.b, curve.tau_hat);
  return s;
}

void write_curve_csv(const CurveEstimate& curve, const std::string& path) {
  std::ofstream out(path);
  if (!out) fail("cannot open file for writing: " + path);
  out << "b,tau_hat,sigma,ci_lo,ci_hi\n";
  for (std::size_t i = 0; i < curve.b.size(); ++i) {
    out << format_double(curve.b[i]) << ',' << format_double(curve.tau_hat[i])
        << ',' << format_double(curve.sigma[i]) << ','
        << format_double(curve.ci_lo[i]) << ','
        << format_double(curve.ci_hi[i]) << '\n';
  }
  if (!out) fail("failed writing curve CSV: " + path);
}

}  // namespace targetbench

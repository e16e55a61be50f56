#include "targetbench/welfare.hpp"

#include <algorithm>
#include <numeric>

#include "targetbench/error.hpp"
#include "targetbench/format.hpp"
#include "targetbench/rng.hpp"
#include "targetbench/stats.hpp"

namespace targetbench {

std::string policy_kind_name(PolicyKind kind) {
  switch (kind) {
    case PolicyKind::risk: return "risk";
    case PolicyKind::treatment_effect: return "treatment_effect";
    case PolicyKind::random_policy: return "random";
  }
  fail("unknown policy kind");
}

PolicyKind policy_kind_from_name(const std::string& name) {
  if (name == "risk") return PolicyKind::risk;
  if (name == "treatment_effect") return PolicyKind::treatment_effect;
  if (name == "random") return PolicyKind::random_policy;
  fail("unknown policy kind: '" + name + "'");
}

std::string welfare_label(const WelfareSpec& spec) {
  switch (spec.kind) {
    case WelfareKind::utilitarian: return "utilitarian";
    case WelfareKind::weighted_utilitarian:
      return "weighted:" + format_double(spec.alpha);
    case WelfareKind::nash: return "nash";
  }
  fail("unknown welfare kind");
}

Assignment assign_top(const std::vector<double>& scores, double budget,
                      std::uint64_t seed) {
  const std::size_t m = scores.size();
  if (m == 0) fail("assign_top: empty scores");
  if (!(budget > 0.0 && budget < 1.0)) fail("assign_top: budget must lie in (0, 1)");
  const std::size_t count = std::max<std::size_t>(ceil_fraction(budget, m), 1);

  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), std::size_t{0});
  RandomStream tie_rng(derive_seed(seed, seed_tag::assign_ties));
  tie_rng.shuffle(order);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return scores[a] > scores[b];
  });

  Assignment out;
  out.a.assign(m, 0);
  out.budget = budget;
  for (std::size_t i = 0; i < count; ++i) out.a[order[i]] = 1;
  return out;
}

Assignment assign_random(std::size_t m, double budget, std::uint64_t seed) {
  RandomStream rng(derive_seed(seed, seed_tag::random_scores));
  std::vector<double> scores(m);
  for (double& s : scores) s = rng.uniform();
  Assignment out = assign_top(scores, budget, seed);
  out.policy_kind = PolicyKind::random_policy;
  return out;
}

double policy_value(const Assignment& assign, const std::vector<double>& benefit,
                    const std::vector<double>& weights) {
  const std::size_t m = assign.a.size();
  if (benefit.size() != m || weights.size() != m)
    fail("policy_value: size mismatch");
  double num = 0.0, den = 0.0;
  for (std::size_t j = 0; j < m; ++j) {
    if (assign.a[j] == 0) continue;
    num += weights[j] * benefit[j];
    den += weights[j];
  }
  if (den <= 0.0) fail("policy_value: assignment selects nothing");
  return num / den;
}

std::vector<double> welfare_weights(const std::vector<double>& b_prime,
                                    double alpha) {
  if (alpha < 0.0) fail("welfare_weights: alpha must be >= 0");
  if (alpha > alpha_cap() + 1e-12)
    fail("welfare_weights: alpha exceeds the cap " + format_double(alpha_cap()));
  if (b_prime.empty()) fail("welfare_weights: empty percentile scores");
  const std::size_t m = b_prime.size();
  std::vector<double> w(m);
  double total = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    w[i] = std::exp(alpha * b_prime[i]);
    total += w[i];
  }
  const double scale = static_cast<double>(m) / total;
  for (double& x : w) x *= scale;
  return w;
}

std::optional<double> alpha_threshold(const AlphaContext& ctx, double budget,
                                      std::uint64_t seed,
                                      const AlphaGrid& grid) {
  const std::size_t m = ctx.benefit.size();
  if (ctx.b.size() != m || ctx.b_prime.size() != m || ctx.te_scores.size() != m)
    fail("alpha_threshold: context vectors must share one length");
  if (!(grid.step > 0.0)) fail("alpha_threshold: grid step must be positive");
  if (grid.hi > alpha_cap() + 1e-12)
    fail("alpha_threshold: grid exceeds the alpha cap");

  const Assignment risk_assign =
      assign_top(ctx.b, budget, derive_seed(seed, seed_tag::alpha_search, 0));
  const Assignment te_assign = assign_top(
      ctx.te_scores, budget, derive_seed(seed, seed_tag::alpha_search, 1));

  for (std::size_t i = 0;; ++i) {
    const double alpha = grid.lo + grid.step * static_cast<double>(i);
    if (alpha > grid.hi + 1e-12) break;
    const auto w = welfare_weights(ctx.b_prime, alpha);
    const double v_risk = policy_value(risk_assign, ctx.benefit, w);
    const double v_te = policy_value(te_assign, ctx.benefit, w);
    if (v_risk >= v_te) return alpha;
  }
  return std::nullopt;
}

}  // namespace targetbench

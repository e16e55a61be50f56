#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace targetbench {

enum class PolicyKind { risk, treatment_effect, random_policy };
enum class TeMode { predicted, oracle_pseudo };

std::string policy_kind_name(PolicyKind kind);
PolicyKind policy_kind_from_name(const std::string& name);

struct Assignment {
  std::vector<int> a;  // 0/1 per row; exactly ceil(budget * m) ones
  double budget = 0.0;
  PolicyKind policy_kind = PolicyKind::risk;
  TeMode te_mode = TeMode::predicted;
};

enum class WelfareKind { utilitarian, weighted_utilitarian, nash };

struct WelfareSpec {
  WelfareKind kind = WelfareKind::utilitarian;
  double alpha = 0.0;  // weighted_utilitarian only
};

std::string welfare_label(const WelfareSpec& spec);

// Largest admissible alpha: caps the 75th/25th percentile weight ratio at 100.
inline double alpha_cap() { return 2.0 * std::log(100.0); }

// Treat the ceil(budget * m) rows with the highest scores; ties are broken by
// a seeded shuffle before sorting.
Assignment assign_top(const std::vector<double>& scores, double budget,
                      std::uint64_t seed);

// Budget-feasible random policy: assign_top over seeded uniform scores.
Assignment assign_random(std::size_t m, double budget, std::uint64_t seed);

// Weighted doubly robust policy value
//   sum_j a_j w_j benefit_j / sum_j a_j w_j
// which with unit weights is the plain mean benefit among selected rows.
double policy_value(const Assignment& assign, const std::vector<double>& benefit,
                    const std::vector<double>& weights);

// Risk-percentile welfare weights w_i = m * exp(alpha * b'_i) / sum_j exp(alpha * b'_j).
// They sum to m; alpha = 0 gives unit weights.
std::vector<double> welfare_weights(const std::vector<double>& b_prime,
                                    double alpha);

struct AlphaGrid {
  double lo = 0.0;
  double hi = alpha_cap();
  double step = 0.25;
};

// Evaluation-split context for the threshold search.
struct AlphaContext {
  std::vector<double> benefit;    // ground-truth benefits
  std::vector<double> b;          // risk scores (ranking for the risk policy)
  std::vector<double> b_prime;    // risk percentiles (weights)
  std::vector<double> te_scores;  // effect scores (ranking for the TE policy)
};

// Smallest grid alpha at which the weighted value of risk-based targeting
// reaches the weighted value of effect-based targeting; nullopt when no grid
// point qualifies. Both assignments are fixed before the scan.
std::optional<double> alpha_threshold(const AlphaContext& ctx, double budget,
                                      std::uint64_t seed,
                                      const AlphaGrid& grid = {});

}  // namespace targetbench

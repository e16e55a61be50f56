// Acceptance gate: one check per criterion, one PASS/FAIL line each.
// Exit status is the number of failed criteria.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "targetbench/cate_curve.hpp"
#include "targetbench/commands.hpp"
#include "targetbench/config.hpp"
#include "targetbench/confounding.hpp"
#include "targetbench/learners.hpp"
#include "targetbench/nuisance.hpp"
#include "targetbench/parallel.hpp"
#include "targetbench/risk.hpp"
#include "targetbench/rng.hpp"
#include "targetbench/stats.hpp"
#include "targetbench/sweep.hpp"
#include "targetbench/synthetic.hpp"
#include "targetbench/welfare.hpp"

using namespace targetbench;
namespace fs = std::filesystem;

namespace {

int failures = 0;

void report(int number, const char* name, bool pass, const std::string& detail) {
  std::printf("[%s] criterion %2d: %s (%s)\n", pass ? "PASS" : "FAIL", number,
              name, detail.c_str());
  std::fflush(stdout);
  if (!pass) ++failures;
}

LearnerSpec ridge_spec() {
  LearnerSpec s;
  s.kind = LearnerKind::ridge_linear;
  return s;
}

LearnerSpec logistic_spec() {
  LearnerSpec s;
  s.kind = LearnerKind::logistic;
  return s;
}

SweepConfig ridge_sweep_config(std::uint64_t seed) {
  SweepConfig cfg;
  cfg.pipeline.outcome = ridge_spec();
  cfg.risk_learner = ridge_spec();
  cfg.cate_learner = ridge_spec();
  cfg.seed = seed;
  return cfg;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

// The evaluation-split ground-truth benefits of a sweep run, recomputed from
// the public pieces the sweep is built from.
std::vector<double> eval_benefits(const Dataset& ds, const SweepConfig& cfg) {
  const SplitPair split = split_dataset(ds, cfg.train_fraction, cfg.seed);
  auto nuis = fit_crossfit(split.train, cfg.pipeline.outcome,
                           cfg.pipeline.propensity, cfg.pipeline.n_folds,
                           cfg.pipeline.propensity_mode,
                           derive_seed(cfg.seed, seed_tag::nuisance));
  nuis.clip_lo = cfg.pipeline.clip_lo;
  nuis.clip_hi = cfg.pipeline.clip_hi;
  return pseudo_outcomes(split.eval, nuis, PseudoMode::ensemble_mean).benefit;
}

// ---------------------------------------------------------------------------

void criterion_1() {
  const auto start = std::chrono::steady_clock::now();
  std::vector<double> ratios;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    SyntheticSpec spec;
    spec.n = 20000;
    spec.d = 6;
    spec.noise_sd = 1.0;
    spec.te_scale = 1.0;
    spec.rho = 0.5;
    spec.seed = seed;
    auto [ds, gt] = generate(spec);
    const auto nuis =
        fit_crossfit(ds, ridge_spec(), logistic_spec(), 2,
                     PropensityMode::estimated_clipped,
                     derive_seed(seed, seed_tag::nuisance));
    const auto po = pseudo_outcomes(ds, nuis, PseudoMode::within_fold);
    const double err = std::abs(ate_estimate(po) - mean(gt.tau));
    ratios.push_back(err / sample_stddev(ds.Y));
  }
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();
  const double med = median(ratios);
  char buf[160];
  std::snprintf(buf, sizeof(buf),
                "median |ate - mean tau| = %.4f sd(Y), limit 0.05; 20 seeds in "
                "%.1fs, limit 60s",
                med, secs);
  report(1, "doubly robust ATE consistency", med < 0.05 && secs < 60.0, buf);
}

void criterion_2() {
  std::vector<double> ratio_a, ratio_b;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    SyntheticSpec spec;
    spec.n = 50000;
    spec.d = 6;
    spec.treat_fraction = 0.3;
    spec.rho = 0.5;
    spec.seed = seed;
    auto [ds, gt] = generate(spec);
    const double truth = mean(gt.tau);
    const double sd_y = sample_stddev(ds.Y);

    const auto fitted =
        fit_crossfit(ds, ridge_spec(), logistic_spec(), 2,
                     PropensityMode::estimated_clipped,
                     derive_seed(seed, seed_tag::nuisance));

    // correct outcome model, propensity forced to the wrong constant 0.5
    CrossFitNuisances wrong_pi = fitted;
    for (auto& fold : wrong_pi.folds)
      fold.pi = make_constant_model(0.5, ds.d());
    const auto po_a = pseudo_outcomes(ds, wrong_pi, PseudoMode::within_fold);
    ratio_a.push_back(std::abs(ate_estimate(po_a) - truth) / sd_y);

    // zero outcome model, propensity at the true design value 0.3
    CrossFitNuisances wrong_mu = fitted;
    for (auto& fold : wrong_mu.folds) {
      fold.mu0 = make_constant_model(0.0, ds.d());
      fold.mu1 = make_constant_model(0.0, ds.d());
      fold.pi = make_constant_model(0.3, ds.d());
    }
    const auto po_b = pseudo_outcomes(ds, wrong_mu, PseudoMode::within_fold);
    ratio_b.push_back(std::abs(ate_estimate(po_b) - truth) / sd_y);
  }
  const double med_a = median(ratio_a);
  const double med_b = median(ratio_b);
  char buf[160];
  std::snprintf(buf, sizeof(buf),
                "median error: wrong propensity %.4f, wrong outcome model "
                "%.4f sd(Y), limit 0.05 each",
                med_a, med_b);
  report(2, "double robustness under misspecification",
         med_a < 0.05 && med_b < 0.05, buf);
}

void criterion_3() {
  int dominant = 0;
  bool exact = true;
  for (std::uint64_t i = 0; i < 20; ++i) {
    SyntheticSpec spec;
    spec.n = 2000;
    spec.d = 6;
    spec.rho = 0.5;
    spec.seed = 100 + i;
    auto [ds, gt] = generate(spec);

    SweepConfig cfg = ridge_sweep_config(200 + i);
    cfg.te_mode = TeMode::oracle_pseudo;
    cfg.bootstrap_reps = 0;
    const ExperimentResult res = sweep(ds, cfg);
    const double risk_v = res.cells[0].value;
    const double te_v = res.cells[1].value;
    const double rand_v = res.cells[2].value;
    if (te_v >= risk_v && te_v >= rand_v) ++dominant;

    // the oracle value must be the mean of the top 20 percent of benefits
    const std::vector<double> benefit = eval_benefits(ds, cfg);
    const std::size_t m = benefit.size();
    const std::size_t count =
        std::max<std::size_t>(ceil_fraction(cfg.budget, m), 1);
    std::vector<std::size_t> order(m);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return benefit[a] > benefit[b];
    });
    std::vector<int> mask(m, 0);
    for (std::size_t j = 0; j < count; ++j) mask[order[j]] = 1;
    double num = 0.0, den = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
      if (mask[j] == 0) continue;
      num += benefit[j];
      den += 1.0;
    }
    if (te_v != num / den) exact = false;
  }
  char buf[160];
  std::snprintf(buf, sizeof(buf),
                "oracle TE >= risk and random on %d/20 seeds; top-20%% mean "
                "benefit matched exactly: %s",
                dominant, exact ? "yes" : "no");
  report(3, "oracle treatment-effect dominance", dominant == 20 && exact, buf);
}

void criterion_4() {
  const std::vector<double> ks = {0.0,  0.05, 0.1,  0.15, 0.2,
                                  0.25, 0.3,  0.35, 0.4};
  std::vector<double> spearmans;
  bool risk_stable = true;
  double worst_spread = 0.0;
  for (std::uint64_t i = 0; i < 20; ++i) {
    SyntheticSpec spec;
    spec.n = 4000;
    spec.d = 6;
    spec.rho = 0.5;
    spec.seed = 300 + i;
    auto [ds, gt] = generate(spec);

    SweepConfig cfg = ridge_sweep_config(400 + i);
    cfg.k_values = ks;
    cfg.te_mode = TeMode::oracle_pseudo;
    cfg.policies = {PolicyKind::risk, PolicyKind::treatment_effect};
    cfg.bootstrap_reps = 200;
    const ExperimentResult res = sweep(ds, cfg);

    const std::size_t nk = ks.size();
    std::vector<double> risk_vals, te_vals;
    for (std::size_t ki = 0; ki < nk; ++ki) {
      risk_vals.push_back(res.cells[ki].value);
      te_vals.push_back(res.cells[nk + ki].value);
    }
    spearmans.push_back(spearman(ks, te_vals));

    const double spread = *std::max_element(risk_vals.begin(), risk_vals.end()) -
                          *std::min_element(risk_vals.begin(), risk_vals.end());
    const double se =
        (res.cells[0].ci_hi - res.cells[0].ci_lo) / (2.0 * 1.959964);
    if (!(spread < 2.0 * se)) risk_stable = false;
    worst_spread = std::max(worst_spread, spread);
  }
  const double med = median(spearmans);
  char buf[160];
  std::snprintf(buf, sizeof(buf),
                "median Spearman(k, TE value) = %.3f, limit -0.8; risk spread "
                "across k at most %.2e (< 2 bootstrap SE: %s)",
                med, worst_spread, risk_stable ? "yes" : "no");
  report(4, "confounding degrades effect targeting", med <= -0.8 && risk_stable,
         buf);
}

void criterion_5() {
  int wins = 0;
  for (std::uint64_t i = 0; i < 20; ++i) {
    SyntheticSpec spec;
    spec.n = 2000;
    spec.d = 6;
    spec.rho = 1.0;
    spec.seed = 500 + i;
    auto [ds, gt] = generate(spec);

    SweepConfig cfg = ridge_sweep_config(600 + i);
    cfg.policies = {PolicyKind::risk, PolicyKind::random_policy};
    cfg.bootstrap_reps = 0;
    const ExperimentResult res = sweep(ds, cfg);
    if (res.cells[0].value > res.cells[1].value) ++wins;
  }
  char buf[120];
  std::snprintf(buf, sizeof(buf), "risk beats random on %d/20 seeds, need 18",
                wins);
  report(5, "risk targeting beats random under full alignment", wins >= 18,
         buf);
}

void criterion_6() {
  const KernelPoint p = kernel_smooth_at({0.0, 1.0}, {0.0, 2.0}, 0.0, 1.0);
  const double expected = 0.7550813375962909;
  const bool two_point = std::abs(p.tau_hat - expected) < 1e-6;

  std::vector<double> b(40), tau(40, 5.0);
  for (std::size_t i = 0; i < b.size(); ++i)
    b[i] = static_cast<double>(i) * 0.25;
  const CurveEstimate curve = kernel_curve(b, tau, 8);
  double worst_width = 0.0, worst_err = 0.0;
  for (std::size_t i = 0; i < curve.b.size(); ++i) {
    worst_width = std::max(worst_width, curve.ci_hi[i] - curve.ci_lo[i]);
    worst_err = std::max(worst_err, std::abs(curve.tau_hat[i] - 5.0));
  }
  const bool constant_ok = worst_width <= 1e-12 && worst_err <= 1e-12;
  char buf[160];
  std::snprintf(buf, sizeof(buf),
                "two-point estimate off by %.1e, limit 1e-6; constant-curve "
                "band width at most %.1e, limit 1e-12",
                std::abs(p.tau_hat - expected), worst_width);
  report(6, "kernel smoother formula fidelity", two_point && constant_ok, buf);
}

void criterion_7() {
  const std::vector<double> b_prime = {0.0, 0.25, 0.5, 0.75, 1.0};
  const std::vector<double> alphas = {0.0, std::log(2.0), 2.0 * std::log(2.0),
                                      9.0};
  bool ratios_ok = true, identity_ok = true;
  double worst = 0.0;
  for (double alpha : alphas) {
    const std::vector<double> w = welfare_weights(b_prime, alpha);
    for (std::size_t step : {1u, 2u}) {  // percentile deltas 0.25 and 0.5
      const double delta = 0.25 * static_cast<double>(step);
      for (std::size_t i = 0; i + step < w.size(); ++i) {
        const double err =
            std::abs(w[i + step] / w[i] - std::exp(alpha * delta));
        worst = std::max(worst, err);
        if (err >= 1e-9) ratios_ok = false;
      }
    }
    // recover alpha from the 75th/25th percentile weights
    const double recovered = 2.0 * std::log(w[3] / w[1]);
    if (std::abs(recovered - alpha) >= 1e-9) identity_ok = false;
  }
  char buf[160];
  std::snprintf(buf, sizeof(buf),
                "largest ratio error %.1e, limit 1e-9; alpha recovered from "
                "w75/w25: %s",
                worst, identity_ok ? "yes" : "no");
  report(7, "welfare weight exponential law", ratios_ok && identity_ok, buf);
}

void criterion_8() {
  SyntheticSpec spec;
  spec.n = 200;
  spec.d = 4;
  spec.seed = 8;
  auto [ds, gt] = generate(spec);
  ConfoundingSpec zero;
  zero.k = 0.0;
  zero.seed = 3;
  const Dataset same = remove_confounded(ds, gt.tau, zero);
  const bool identity = same.X.data == ds.X.data && same.W == ds.W &&
                        same.Y == ds.Y;

  RandomStream rng(777);
  bool counts_ok = true;
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n_t = 5 + static_cast<std::size_t>(rng.uniform_int(200));
    const std::size_t n_c = 5 + static_cast<std::size_t>(rng.uniform_int(200));
    const double k = 0.8 * rng.uniform();
    const std::size_t n = n_t + n_c;
    Dataset arm;
    arm.name = "arm";
    arm.X = Matrix(n, 1);
    arm.W.assign(n, 0);
    arm.Y.assign(n, 0.0);
    arm.feature_names = {"x0"};
    std::vector<double> benefit(n);
    for (std::size_t i = 0; i < n; ++i) {
      arm.X(i, 0) = rng.normal();
      arm.W[i] = i < n_t ? 1 : 0;
      arm.Y[i] = rng.normal();
      benefit[i] = rng.uniform();
    }
    ConfoundingSpec cs;
    cs.k = k;
    cs.seed = static_cast<std::uint64_t>(trial);
    const Dataset conf = remove_confounded(arm, benefit, cs);
    const std::size_t removed_t = n_t - conf.treated_count();
    const std::size_t removed_c = n_c - conf.control_count();
    const auto want_t = static_cast<std::size_t>(
        std::ceil(k * static_cast<double>(n_t)));
    const auto want_c = static_cast<std::size_t>(
        std::ceil(k * static_cast<double>(n_c)));
    if (removed_t != want_t || removed_c != want_c) counts_ok = false;
  }
  char buf[160];
  std::snprintf(buf, sizeof(buf),
                "k=0 row-identical: %s; ceiling removal counts matched on "
                "50/50 random triples: %s",
                identity ? "yes" : "no", counts_ok ? "yes" : "no");
  report(8, "confounding identity and removal counts", identity && counts_ok,
         buf);
}

void criterion_9() {
  bool all_match = true;
  for (int inst = 0; inst < 10; ++inst) {
    RandomStream rng(9000 + static_cast<std::uint64_t>(inst));
    const std::size_t m = 20;
    AlphaContext ctx;
    ctx.b.resize(m);
    ctx.benefit.resize(m);
    ctx.te_scores.resize(m);
    for (std::size_t i = 0; i < m; ++i) {
      ctx.b[i] = rng.uniform();
      ctx.benefit[i] = rng.normal();
      ctx.te_scores[i] = rng.normal();
    }
    const std::vector<double> ranks = average_ranks(ctx.b);
    ctx.b_prime.resize(m);
    for (std::size_t i = 0; i < m; ++i)
      ctx.b_prime[i] = (ranks[i] - 1.0) / static_cast<double>(m - 1);

    const double budget = 0.25;
    const std::uint64_t seed = static_cast<std::uint64_t>(inst);
    const std::optional<double> got = alpha_threshold(ctx, budget, seed);

    // independent exhaustive scan over the full grid
    const Assignment risk = assign_top(
        ctx.b, budget, derive_seed(seed, seed_tag::alpha_search, 0));
    const Assignment te = assign_top(
        ctx.te_scores, budget, derive_seed(seed, seed_tag::alpha_search, 1));
    std::optional<double> want;
    for (int i = 0; i <= 36; ++i) {
      const double alpha = 0.25 * i;
      const std::vector<double> w = welfare_weights(ctx.b_prime, alpha);
      if (policy_value(risk, ctx.benefit, w) >=
          policy_value(te, ctx.benefit, w)) {
        want = alpha;
        break;
      }
    }
    if (got != want) all_match = false;
  }
  report(9, "alpha threshold equals brute-force grid search", all_match,
         all_match ? "10/10 instances identical" : "mismatch found");
}

void criterion_10() {
  bool all_ranked_same = true;
  for (std::uint64_t i = 0; i < 20; ++i) {
    SyntheticSpec spec;
    spec.n = 600;
    spec.d = 4;
    spec.rho = 0.5;
    spec.seed = 700 + i;
    auto [ds, gt] = generate(spec);
    // strictly positive outcomes
    for (double& y : ds.Y) y = std::exp(0.15 * y) + 0.2;

    SweepConfig cfg = ridge_sweep_config(800 + i);
    cfg.bootstrap_reps = 0;
    cfg.welfare = {WelfareSpec{WelfareKind::nash, 0.0}};
    const ExperimentResult nash = sweep(ds, cfg);

    const double lo = *std::min_element(ds.Y.begin(), ds.Y.end());
    const Dataset logged = log_outcomes(ds, lo < 1.0 ? 1.0 - lo : 0.0);
    cfg.welfare = {WelfareSpec{}};
    const ExperimentResult util = sweep(logged, cfg);

    auto ranking = [](const ExperimentResult& r) {
      std::vector<std::size_t> order = {0, 1, 2};
      std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return r.cells[a].value > r.cells[b].value;
      });
      return order;
    };
    if (ranking(nash) != ranking(util)) all_ranked_same = false;
    for (std::size_t c = 0; c < 3; ++c)
      if (nash.cells[c].value != util.cells[c].value) all_ranked_same = false;
  }
  report(10, "nash ranking equals utilitarian ranking on log outcomes",
         all_ranked_same,
         all_ranked_same ? "identical on 20/20 seeds (values bit-equal)"
                         : "ranking diverged");
}

void criterion_11() {
  RunConfig cfg;
  cfg.source.synthetic.n = 600;
  cfg.source.synthetic.d = 5;
  cfg.source.synthetic.rho = 0.5;
  cfg.sweep.seed = 11;
  cfg.sweep.k_values = {0.0, 0.2};
  cfg.sweep.bootstrap_reps = 300;
  cfg.sweep.welfare = {WelfareSpec{},
                       WelfareSpec{WelfareKind::weighted_utilitarian, 1.5},
                       WelfareSpec{WelfareKind::nash, 0.0}};
  LearnerSpec forest;
  forest.n_trees = 50;
  cfg.sweep.pipeline.outcome = forest;
  cfg.sweep.risk_learner = ridge_spec();
  cfg.sweep.cate_learner = ridge_spec();

  const fs::path base = fs::temp_directory_path() / "targetbench_accept11";
  std::error_code ec;
  fs::remove_all(base, ec);

  const std::size_t saved = thread_count();
  cfg.out_dir = (base / "t1").string();
  set_thread_count(1);
  cmd_sweep(cfg);
  cfg.out_dir = (base / "t8").string();
  set_thread_count(8);
  cmd_sweep(cfg);
  cfg.out_dir = (base / "t8_again").string();
  cmd_sweep(cfg);
  set_thread_count(saved);

  const std::string csv1 = read_file((base / "t1" / "sweep.csv").string());
  const std::string csv8 = read_file((base / "t8" / "sweep.csv").string());
  const std::string csv8b =
      read_file((base / "t8_again" / "sweep.csv").string());
  const std::string json1 = read_file((base / "t1" / "sweep.json").string());
  const std::string json8 = read_file((base / "t8" / "sweep.json").string());
  const bool ok = !csv1.empty() && csv1 == csv8 && csv8 == csv8b &&
                  json1 == json8;
  fs::remove_all(base, ec);
  report(11, "sweep outputs byte-identical across runs and thread counts", ok,
         ok ? "sweep.csv and sweep.json identical for 1 vs 8 threads and rerun"
            : "outputs differ");
}

}  // namespace

int main() {
  set_thread_count(8);
  criterion_1();
  criterion_2();
  criterion_3();
  criterion_4();
  criterion_5();
  criterion_6();
  criterion_7();
  criterion_8();
  criterion_9();
  criterion_10();
  criterion_11();
  std::printf("%d of 11 criteria passed\n", 11 - failures);
  return failures;
}

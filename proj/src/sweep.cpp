#include "targetbench/sweep.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

#include "json.hpp"
#include "targetbench/cate_curve.hpp"
#include "targetbench/confounding.hpp"
#include "targetbench/format.hpp"
#include "targetbench/parallel.hpp"
#include "targetbench/rng.hpp"
#include "targetbench/stats.hpp"

namespace targetbench {

namespace {

void validate_config(const SweepConfig& cfg) {
  if (cfg.k_values.empty()) fail("sweep config: k list is empty");
  for (double k : cfg.k_values)
    if (!(k >= 0.0 && k < 1.0)) fail("sweep config: k values must lie in [0, 1)");
  if (!(cfg.budget > 0.0 && cfg.budget < 1.0))
    fail("sweep config: budget must lie in (0, 1)");
  if (!(cfg.train_fraction > 0.0 && cfg.train_fraction < 1.0))
    fail("sweep config: train_fraction must lie in (0, 1)");
  if (cfg.policies.empty()) fail("sweep config: policy list is empty");
  if (cfg.welfare.empty()) fail("sweep config: welfare list is empty");
  for (const auto& w : cfg.welfare) {
    if (w.kind == WelfareKind::weighted_utilitarian &&
        (w.alpha < 0.0 || w.alpha > alpha_cap() + 1e-12))
      fail("sweep config: weighted welfare alpha outside [0, cap]");
  }
}

CrossFitNuisances fit_pipeline_nuisances(const Dataset& train,
                                         const PipelineSpec& pipe,
                                         std::uint64_t seed) {
  auto nuis = fit_crossfit(train, pipe.outcome, pipe.propensity, pipe.n_folds,
                           pipe.propensity_mode,
                           derive_seed(seed, seed_tag::nuisance));
  nuis.clip_lo = pipe.clip_lo;
  nuis.clip_hi = pipe.clip_hi;
  return nuis;
}

struct CoreArtifacts {
  CrossFitNuisances gt_nuis;
  PseudoOutcomes eval_po;   // ensemble-mean ground truth for the eval split
  PseudoOutcomes train_po;  // within-fold scores driving the removal
  RiskScores risk_eval;
  Assignment risk_assign;
  Assignment random_assign;
  bool has_risk = false;
};

CoreArtifacts build_artifacts(const Dataset& train, const Dataset& eval,
                              const SweepConfig& cfg, bool need_risk,
                              bool need_random) {
  CoreArtifacts art;
  art.gt_nuis = fit_pipeline_nuisances(train, cfg.pipeline, cfg.seed);
  art.eval_po = pseudo_outcomes(eval, art.gt_nuis, PseudoMode::ensemble_mean);
  art.train_po = pseudo_outcomes(train, art.gt_nuis, PseudoMode::within_fold);

  if (need_risk) {
    LearnerSpec risk_spec = cfg.risk_learner;
    risk_spec.seed = derive_seed(cfg.seed, seed_tag::risk_fit);
    const auto model = fit_risk_model(train, risk_spec);
    art.risk_eval = score_risk(eval, *model);
    art.risk_assign = assign_top(art.risk_eval.b, cfg.budget,
                                 derive_seed(cfg.seed, seed_tag::assign_ties, 0));
    art.risk_assign.policy_kind = PolicyKind::risk;
    art.has_risk = true;
  }
  if (need_random)
    art.random_assign = assign_random(eval.n(), cfg.budget, cfg.seed);
  return art;
}

std::vector<double> te_scores_at_k(const Dataset& train, const Dataset& eval,
                                   const CoreArtifacts& art,
                                   const SweepConfig& cfg, double k,
                                   std::size_t k_index) {
  ConfoundingSpec conf_spec;
  conf_spec.k = k;
  conf_spec.seed = derive_seed(cfg.seed, seed_tag::confound_ties, k_index);
  const Dataset conf = remove_confounded(train, art.train_po.benefit, conf_spec);

  // k = 0 removes nothing; the refit would reproduce the ground-truth
  // nuisances bit for bit (same rows, same seed), so reuse them.
  const bool unchanged = conf.n() == train.n();
  CrossFitNuisances fresh;
  if (!unchanged) fresh = fit_pipeline_nuisances(conf, cfg.pipeline, cfg.seed);
  const CrossFitNuisances& conf_nuis = unchanged ? art.gt_nuis : fresh;

  if (cfg.te_mode == TeMode::oracle_pseudo) {
    if (unchanged) return art.eval_po.benefit;
    const auto po = pseudo_outcomes(eval, conf_nuis, PseudoMode::ensemble_mean);
    return po.benefit;
  }

  const PseudoOutcomes conf_po =
      unchanged ? art.train_po
                : pseudo_outcomes(conf, conf_nuis, PseudoMode::within_fold);
  LearnerSpec cate_spec = cfg.cate_learner;
  cate_spec.seed = derive_seed(cfg.seed, seed_tag::cate_fit, k_index);
  const CateModel cate =
      fit_cate(conf.X, conf_po, cate_spec, "second stage on biased split");
  const auto pred = cate.model->predict(eval.X);
  const double sign = effect_sign(eval.outcome_direction);
  std::vector<double> scores(pred.size());
  for (std::size_t i = 0; i < pred.size(); ++i) scores[i] = sign * pred[i];
  return scores;
}

// Percentile bootstrap over evaluation rows. For each replicate the same
// resampled rows score every policy/welfare combination, so the replicate
// draws are shared across cells of one k.
struct CellEstimates {
  double value = 0.0;
  double ci_lo = 0.0;
  double ci_hi = 0.0;
  std::size_t reps = 0;
};

std::vector<CellEstimates> bootstrap_cells(
    const std::vector<const Assignment*>& assigns,
    const std::vector<std::vector<double>>& weight_sets,
    const std::vector<double>& benefit, const SweepConfig& cfg,
    std::size_t k_index) {
  const std::size_t m = benefit.size();
  const std::size_t n_combos = assigns.size() * weight_sets.size();

  std::vector<CellEstimates> cells(n_combos);
  std::vector<std::vector<double>> sel_w(n_combos), sel_wb(n_combos);
  for (std::size_t p = 0; p < assigns.size(); ++p) {
    for (std::size_t w = 0; w < weight_sets.size(); ++w) {
      const std::size_t c = p * weight_sets.size() + w;
      const auto& a = assigns[p]->a;
      const auto& wt = weight_sets[w];
      sel_w[c].assign(m, 0.0);
      sel_wb[c].assign(m, 0.0);
      for (std::size_t j = 0; j < m; ++j) {
        if (a[j] == 0) continue;
        sel_w[c][j] = wt[j];
        sel_wb[c][j] = wt[j] * benefit[j];
      }
      cells[c].value = policy_value(*assigns[p], benefit, wt);
    }
  }

  const std::size_t reps = cfg.bootstrap_reps;
  if (reps == 0) {
    for (auto& cell : cells) {
      cell.ci_lo = cell.value;
      cell.ci_hi = cell.value;
    }
    return cells;
  }

  std::vector<std::vector<double>> rep_values(n_combos);
  for (auto& v : rep_values)
    v.assign(reps, std::numeric_limits<double>::quiet_NaN());

  parallel_for(0, reps, [&](std::size_t r) {
    RandomStream rng(
        derive_seed(cfg.seed, seed_tag::bootstrap, k_index * reps + r));
    std::vector<std::size_t> idx(m);
    for (std::size_t j = 0; j < m; ++j)
      idx[j] = static_cast<std::size_t>(rng.uniform_int(m));
    for (std::size_t c = 0; c < n_combos; ++c) {
      double num = 0.0, den = 0.0;
      for (std::size_t j = 0; j < m; ++j) {
        num += sel_wb[c][idx[j]];
        den += sel_w[c][idx[j]];
      }
      if (den > 0.0) rep_values[c][r] = num / den;
    }
  });

  for (std::size_t c = 0; c < n_combos; ++c) {
    std::vector<double> vals;
    vals.reserve(reps);
    for (double v : rep_values[c])
      if (!std::isnan(v)) vals.push_back(v);
    auto& cell = cells[c];
    cell.reps = vals.size();
    if (vals.empty()) {
      cell.ci_lo = cell.value;
      cell.ci_hi = cell.value;
      continue;
    }
    cell.ci_lo = std::min(quantile(vals, 0.025), cell.value);
    cell.ci_hi = std::max(quantile(vals, 0.975), cell.value);
  }
  return cells;
}

// Runs the whole grid for one train/eval pair. `labels` names each welfare
// spec's output rows (the Nash pipeline reuses the utilitarian machinery on
// log outcomes under its own label). Returned blocks are indexed by welfare.
std::vector<std::vector<CellResult>> core_run(
    const Dataset& train, const Dataset& eval, const SweepConfig& cfg,
    const std::vector<WelfareSpec>& welfare,
    const std::vector<std::string>& labels) {
  bool need_te = false, need_risk = false, need_random = false;
  for (PolicyKind p : cfg.policies) {
    if (p == PolicyKind::treatment_effect) need_te = true;
    if (p == PolicyKind::risk) need_risk = true;
    if (p == PolicyKind::random_policy) need_random = true;
  }
  for (const auto& w : welfare)
    if (w.kind == WelfareKind::weighted_utilitarian) need_risk = true;

  const CoreArtifacts art = build_artifacts(train, eval, cfg, need_risk,
                                            need_random);

  std::vector<std::vector<double>> weight_sets;
  for (const auto& w : welfare) {
    if (w.kind == WelfareKind::weighted_utilitarian)
      weight_sets.push_back(welfare_weights(art.risk_eval.b_prime, w.alpha));
    else
      weight_sets.emplace_back(eval.n(), 1.0);
  }

  std::vector<std::vector<CellResult>> blocks(welfare.size());
  for (auto& b : blocks) b.reserve(cfg.policies.size() * cfg.k_values.size());
  for (std::size_t wi = 0; wi < welfare.size(); ++wi)
    blocks[wi].resize(cfg.policies.size() * cfg.k_values.size());

  for (std::size_t ki = 0; ki < cfg.k_values.size(); ++ki) {
    const double k = cfg.k_values[ki];
    Assignment te_assign;
    if (need_te) {
      const auto te_scores = te_scores_at_k(train, eval, art, cfg, k, ki);
      te_assign = assign_top(te_scores, cfg.budget,
                             derive_seed(cfg.seed, seed_tag::assign_ties, 2 + ki));
      te_assign.policy_kind = PolicyKind::treatment_effect;
      te_assign.te_mode = cfg.te_mode;
    }

    std::vector<const Assignment*> assigns;
    for (PolicyKind p : cfg.policies) {
      switch (p) {
        case PolicyKind::risk: assigns.push_back(&art.risk_assign); break;
        case PolicyKind::treatment_effect: assigns.push_back(&te_assign); break;
        case PolicyKind::random_policy: assigns.push_back(&art.random_assign); break;
      }
    }

    const auto cells =
        bootstrap_cells(assigns, weight_sets, art.eval_po.benefit, cfg, ki);
    for (std::size_t pi = 0; pi < cfg.policies.size(); ++pi) {
      for (std::size_t wi = 0; wi < welfare.size(); ++wi) {
        const auto& est = cells[pi * welfare.size() + wi];
        CellResult cell;
        cell.welfare = labels[wi];
        cell.policy = cfg.policies[pi];
        cell.k = k;
        cell.value = est.value;
        cell.ci_lo = est.ci_lo;
        cell.ci_hi = est.ci_hi;
        cell.bootstrap_reps = est.reps;
        blocks[wi][pi * cfg.k_values.size() + ki] = std::move(cell);
      }
    }
  }
  return blocks;
}

}  // namespace

double nash_shift(const Dataset& train, const Dataset& eval) {
  if (train.Y.empty() && eval.Y.empty()) fail("nash_shift: no outcomes");
  double lo = std::numeric_limits<double>::infinity();
  for (double y : train.Y) lo = std::min(lo, y);
  for (double y : eval.Y) lo = std::min(lo, y);
  return lo < 1.0 ? 1.0 - lo : 0.0;
}

Dataset log_outcomes(const Dataset& ds, double shift) {
  Dataset out = ds;
  for (double& y : out.Y) {
    const double shifted = y + shift;
    if (!(shifted > 0.0))
      fail("log_outcomes: shifted outcome is not positive");
    y = std::log(shifted);
  }
  return out;
}

std::pair<Dataset, Dataset> nash_log_datasets(const Dataset& train,
                                              const Dataset& eval,
                                              NashScaling scaling) {
  if (scaling == NashScaling::additive) {
    const double shift = nash_shift(train, eval);
    return {log_outcomes(train, shift), log_outcomes(eval, shift)};
  }
  double lo = std::numeric_limits<double>::infinity();
  for (double y : train.Y) lo = std::min(lo, y);
  for (double y : eval.Y) lo = std::min(lo, y);
  if (!(lo > 0.0))
    fail("nash multiplicative scaling needs strictly positive outcomes");
  const double factor = lo < 1.0 ? 1.0 / lo : 1.0;
  auto scale_log = [factor](const Dataset& ds) {
    Dataset out = ds;
    for (double& y : out.Y) y = std::log(y * factor);
    return out;
  };
  return {scale_log(train), scale_log(eval)};
}

double nash_policy_value(const Dataset& train, const Dataset& eval,
                         const PipelineSpec& pipe, std::uint64_t seed,
                         const Assignment& assign, NashScaling scaling) {
  auto [log_train, log_eval] = nash_log_datasets(train, eval, scaling);
  const auto nuis = fit_pipeline_nuisances(log_train, pipe, seed);
  const auto po = pseudo_outcomes(log_eval, nuis, PseudoMode::ensemble_mean);
  const std::vector<double> unit(log_eval.n(), 1.0);
  return policy_value(assign, po.benefit, unit);
}

ExperimentResult sweep(const Dataset& ds, const SweepConfig& cfg) {
  validate_config(cfg);
  const SplitPair split = split_dataset(ds, cfg.train_fraction, cfg.seed);

  std::vector<WelfareSpec> direct;
  std::vector<std::string> direct_labels;
  std::vector<std::size_t> direct_pos;  // index into cfg.welfare
  std::vector<std::size_t> nash_pos;
  for (std::size_t i = 0; i < cfg.welfare.size(); ++i) {
    if (cfg.welfare[i].kind == WelfareKind::nash) {
      nash_pos.push_back(i);
    } else {
      direct.push_back(cfg.welfare[i]);
      direct_labels.push_back(welfare_label(cfg.welfare[i]));
      direct_pos.push_back(i);
    }
  }

  std::vector<std::vector<CellResult>> blocks(cfg.welfare.size());
  if (!direct.empty()) {
    auto got = core_run(split.train, split.eval, cfg, direct, direct_labels);
    for (std::size_t i = 0; i < direct.size(); ++i)
      blocks[direct_pos[i]] = std::move(got[i]);
  }
  if (!nash_pos.empty()) {
    auto [log_train, log_eval] =
        nash_log_datasets(split.train, split.eval, cfg.nash_scaling);
    auto got = core_run(log_train, log_eval, cfg, {WelfareSpec{}}, {"nash"});
    for (std::size_t pos : nash_pos) blocks[pos] = got[0];
  }

  ExperimentResult result;
  result.dataset = ds.name;
  result.budget = cfg.budget;
  result.seed = cfg.seed;
  result.te_mode = cfg.te_mode;
  for (auto& block : blocks)
    for (auto& cell : block) result.cells.push_back(std::move(cell));
  return result;
}

std::vector<AlphaRow> alpha_table(const Dataset& ds, const SweepConfig& cfg) {
  validate_config(cfg);
  const SplitPair split = split_dataset(ds, cfg.train_fraction, cfg.seed);
  const CoreArtifacts art =
      build_artifacts(split.train, split.eval, cfg, true, false);

  std::vector<AlphaRow> rows;
  rows.reserve(cfg.k_values.size());
  for (std::size_t ki = 0; ki < cfg.k_values.size(); ++ki) {
    const auto te_scores =
        te_scores_at_k(split.train, split.eval, art, cfg, cfg.k_values[ki], ki);
    AlphaContext ctx;
    ctx.benefit = art.eval_po.benefit;
    ctx.b = art.risk_eval.b;
    ctx.b_prime = art.risk_eval.b_prime;
    ctx.te_scores = te_scores;
    AlphaRow row;
    row.k = cfg.k_values[ki];
    row.alpha = alpha_threshold(ctx, cfg.budget, cfg.seed);
    rows.push_back(row);
  }
  return rows;
}

void write_result_json(const ExperimentResult& result, const std::string& path) {
  nlohmann::ordered_json root;
  root["dataset"] = result.dataset;
  root["budget"] = result.budget;
  root["seed"] = result.seed;
  root["te_mode"] =
      result.te_mode == TeMode::predicted ? "predicted" : "oracle_pseudo";
  nlohmann::ordered_json welfares = nlohmann::ordered_json::object();
  for (const auto& cell : result.cells) {
    nlohmann::ordered_json entry;
    entry["k"] = cell.k;
    entry["value"] = cell.value;
    entry["ci_lo"] = cell.ci_lo;
    entry["ci_hi"] = cell.ci_hi;
    entry["reps"] = cell.bootstrap_reps;
    welfares[cell.welfare][policy_kind_name(cell.policy)].push_back(entry);
  }
  root["welfares"] = std::move(welfares);

  std::ofstream out(path);
  if (!out) fail("cannot open file for writing: " + path);
  out << root.dump(2) << '\n';
  if (!out) fail("failed writing JSON: " + path);
}

void write_result_csv(const ExperimentResult& result, const std::string& path) {
  std::ofstream out(path);
  if (!out) fail("cannot open file for writing: " + path);
  out << "welfare,policy,k,value,ci_lo,ci_hi\n";
  for (const auto& cell : result.cells) {
    out << cell.welfare << ',' << policy_kind_name(cell.policy) << ','
        << format_double(cell.k) << ',' << format_double(cell.value) << ','
        << format_double(cell.ci_lo) << ',' << format_double(cell.ci_hi)
        << '\n';
  }
  if (!out) fail("failed writing CSV: " + path);
}

void write_alpha_csv(const std::string& dataset,
                     const std::vector<AlphaRow>& rows,
                     const std::string& path) {
  std::ofstream out(path);
  if (!out) fail("cannot open file for writing: " + path);
  out << "dataset";
  for (const auto& row : rows) out << ',' << format_double(row.k * 100.0) << '%';
  out << '\n' << dataset;
  for (const auto& row : rows) {
    out << ',';
    if (row.alpha) out << format_double(*row.alpha);
    else out << "na";
  }
  out << '\n';
  if (!out) fail("failed writing alpha CSV: " + path);
}

}  // namespace targetbench

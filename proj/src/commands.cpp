#include "targetbench/commands.hpp"

#include <filesystem>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include "targetbench/cate_curve.hpp"
#include "targetbench/error.hpp"
#include "targetbench/format.hpp"
#include "targetbench/nuisance.hpp"
#include "targetbench/risk.hpp"
#include "targetbench/rng.hpp"
#include "targetbench/svg.hpp"
#include "targetbench/sweep.hpp"
#include "targetbench/synthetic.hpp"

namespace targetbench {

namespace {

namespace fs = std::filesystem;

std::string out_path(const RunConfig& cfg, const std::string& file) {
  return (fs::path(cfg.out_dir) / file).string();
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail("cannot open " + path + " for writing");
  out << text;
  if (!out) fail("failed writing " + path);
}

// Created lazily so that commands which error out during computation leave
// nothing behind.
void ensure_out_dir(const RunConfig& cfg) {
  std::error_code ec;
  fs::create_directories(cfg.out_dir, ec);
  if (ec) fail("cannot create output directory " + cfg.out_dir + ": " + ec.message());
}

std::string write_effective_config(const RunConfig& cfg,
                                   std::vector<std::string>& files) {
  const std::string path = out_path(cfg, "effective_config.json");
  write_text_file(path, effective_config_text(cfg));
  files.push_back(path);
  return path;
}

std::string color_for_policy(PolicyKind kind) {
  switch (kind) {
    case PolicyKind::risk: return "#1f77b4";
    case PolicyKind::treatment_effect: return "#d62728";
    case PolicyKind::random_policy: return "#2ca02c";
  }
  return "#555555";
}

std::string sanitize_for_filename(const std::string& label) {
  std::string out = label;
  for (char& c : out) {
    const bool keep = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
                      (c >= '0' && c <= '9') || c == '.' || c == '-';
    if (!keep) c = '_';
  }
  return out;
}

} // namespace

std::vector<std::string> cmd_synth(const RunConfig& cfg) {
  if (!cfg.source.is_synthetic)
    fail("synth requires a synthetic dataset source");
  auto [ds, gt] = materialize_dataset(cfg);

  ensure_out_dir(cfg);
  std::vector<std::string> files;
  const std::string data_path = out_path(cfg, ds.name + ".csv");
  write_csv(ds, data_path);
  files.push_back(data_path);
  const std::string truth_path = out_path(cfg, ds.name + "_truth.csv");
  write_ground_truth_csv(*gt, truth_path);
  files.push_back(truth_path);
  write_effective_config(cfg, files);
  return files;
}

std::vector<std::string> cmd_curve(const RunConfig& cfg) {
  auto [ds, gt] = materialize_dataset(cfg);
  const SweepConfig& sw = cfg.sweep;
  SplitPair split = split_dataset(ds, sw.train_fraction, sw.seed);

  CrossFitNuisances nuis = fit_crossfit(
      split.train, sw.pipeline.outcome, sw.pipeline.propensity,
      sw.pipeline.n_folds, sw.pipeline.propensity_mode,
      derive_seed(sw.seed, seed_tag::nuisance));
  nuis.clip_lo = sw.pipeline.clip_lo;
  nuis.clip_hi = sw.pipeline.clip_hi;
  PseudoOutcomes po = pseudo_outcomes(split.eval, nuis, PseudoMode::ensemble_mean);

  LearnerSpec risk_spec = sw.risk_learner;
  risk_spec.seed = derive_seed(sw.seed, seed_tag::risk_fit);
  ModelPtr risk_model = fit_risk_model(split.train, risk_spec);
  RiskScores risk = score_risk(split.eval, *risk_model);

  CurveEstimate curve = kernel_curve(risk.b, po.benefit, cfg.window);

  ensure_out_dir(cfg);
  std::vector<std::string> files;
  const std::string csv_path = out_path(cfg, "curve.csv");
  write_curve_csv(curve, csv_path);
  files.push_back(csv_path);

  PlotSeries series;
  series.label = "benefit";
  series.color = "#1f77b4";
  series.x = curve.b;
  series.y = curve.tau_hat;
  series.lo = curve.ci_lo;
  series.hi = curve.ci_hi;
  const std::string svg_path = out_path(cfg, "curve.svg");
  write_line_plot_svg(svg_path, ds.name + ": benefit by baseline risk",
                      "baseline risk", "estimated benefit", {series});
  files.push_back(svg_path);

  write_effective_config(cfg, files);
  return files;
}

std::vector<std::string> cmd_sweep(const RunConfig& cfg) {
  auto [ds, gt] = materialize_dataset(cfg);
  ExperimentResult result = sweep(ds, cfg.sweep);

  ensure_out_dir(cfg);
  std::vector<std::string> files;
  const std::string json_path = out_path(cfg, "sweep.json");
  write_result_json(result, json_path);
  files.push_back(json_path);
  const std::string csv_path = out_path(cfg, "sweep.csv");
  write_result_csv(result, csv_path);
  files.push_back(csv_path);

  // One plot per welfare block: policy value against the percentage of data
  // removed, with bootstrap bands.
  const std::size_t n_k = cfg.sweep.k_values.size();
  const std::size_t n_pol = cfg.sweep.policies.size();
  for (std::size_t wi = 0; wi < cfg.sweep.welfare.size(); ++wi) {
    const std::string label = welfare_label(cfg.sweep.welfare[wi]);
    std::vector<PlotSeries> series;
    for (std::size_t pi = 0; pi < n_pol; ++pi) {
      PlotSeries s;
      s.label = policy_kind_name(cfg.sweep.policies[pi]);
      s.color = color_for_policy(cfg.sweep.policies[pi]);
      for (std::size_t ki = 0; ki < n_k; ++ki) {
        const CellResult& cell = result.cells[(wi * n_pol + pi) * n_k + ki];
        s.x.push_back(cell.k * 100.0);
        s.y.push_back(cell.value);
        s.lo.push_back(cell.ci_lo);
        s.hi.push_back(cell.ci_hi);
      }
      series.push_back(std::move(s));
    }
    const std::string svg_path =
        out_path(cfg, "sweep_" + sanitize_for_filename(label) + ".svg");
    write_line_plot_svg(svg_path, ds.name + ": " + label + " policy value",
                        "data removed (%)", "policy value", series);
    files.push_back(svg_path);
  }

  write_effective_config(cfg, files);
  return files;
}

std::vector<std::string> cmd_alpha(const RunConfig& cfg) {
  auto [ds, gt] = materialize_dataset(cfg);
  std::vector<AlphaRow> rows = alpha_table(ds, cfg.sweep);

  ensure_out_dir(cfg);
  std::vector<std::string> files;
  const std::string csv_path = out_path(cfg, "alpha.csv");
  write_alpha_csv(ds.name, rows, csv_path);
  files.push_back(csv_path);
  write_effective_config(cfg, files);
  return files;
}

} // namespace targetbench

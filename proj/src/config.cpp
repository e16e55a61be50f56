#include "targetbench/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

namespace targetbench {

namespace {

using json = nlohmann::ordered_json;

void check_keys(const json& j, const std::string& where,
                const std::set<std::string>& allowed) {
  if (!j.is_object()) fail("config: " + where + " must be an object");
  for (const auto& item : j.items()) {
    if (!allowed.count(item.key()))
      fail("config: unknown key '" + item.key() + "' in " + where);
  }
}

double get_real(const json& j, const std::string& key, double fallback) {
  if (!j.contains(key)) return fallback;
  if (!j.at(key).is_number()) fail("config: '" + key + "' must be a number");
  return j.at(key).get<double>();
}

std::size_t get_count(const json& j, const std::string& key,
                      std::size_t fallback) {
  if (!j.contains(key)) return fallback;
  if (!j.at(key).is_number_unsigned())
    fail("config: '" + key + "' must be a non-negative integer");
  return j.at(key).get<std::size_t>();
}

std::string get_text(const json& j, const std::string& key,
                     const std::string& fallback) {
  if (!j.contains(key)) return fallback;
  if (!j.at(key).is_string()) fail("config: '" + key + "' must be a string");
  return j.at(key).get<std::string>();
}

OutcomeDirection direction_from_name(const std::string& name) {
  if (name == "higher_is_better") return OutcomeDirection::higher_is_better;
  if (name == "lower_is_better") return OutcomeDirection::lower_is_better;
  fail("config: unknown outcome_direction '" + name + "'");
}

std::string direction_name(OutcomeDirection d) {
  return d == OutcomeDirection::higher_is_better ? "higher_is_better"
                                                 : "lower_is_better";
}

LearnerSpec parse_learner(const json& j, const std::string& where,
                          const LearnerSpec& defaults) {
  check_keys(j, where,
             {"kind", "n_trees", "max_depth", "min_leaf", "mtry_fraction",
              "ridge_lambda"});
  LearnerSpec spec = defaults;
  if (j.contains("kind"))
    spec.kind = learner_kind_from_name(get_text(j, "kind", ""));
  spec.n_trees = get_count(j, "n_trees", spec.n_trees);
  spec.max_depth = get_count(j, "max_depth", spec.max_depth);
  spec.min_leaf = get_count(j, "min_leaf", spec.min_leaf);
  spec.mtry_fraction = get_real(j, "mtry_fraction", spec.mtry_fraction);
  spec.ridge_lambda = get_real(j, "ridge_lambda", spec.ridge_lambda);
  return spec;
}

json learner_to_json(const LearnerSpec& spec) {
  json j;
  j["kind"] = learner_kind_name(spec.kind);
  j["n_trees"] = spec.n_trees;
  j["max_depth"] = spec.max_depth;
  j["min_leaf"] = spec.min_leaf;
  j["mtry_fraction"] = spec.mtry_fraction;
  j["ridge_lambda"] = spec.ridge_lambda;
  return j;
}

RunConfig parse_json(const json& root) {
  check_keys(root, "top level",
             {"dataset", "seed", "out_dir", "window", "split", "pipeline",
              "learners", "experiment"});
  RunConfig cfg;

  if (!root.contains("dataset")) fail("config: 'dataset' section is required");
  const json& ds = root.at("dataset");
  check_keys(ds, "dataset", {"synthetic", "csv"});
  if (ds.contains("synthetic") == ds.contains("csv"))
    fail("config: dataset needs exactly one of 'synthetic' or 'csv'");
  if (ds.contains("synthetic")) {
    const json& s = ds.at("synthetic");
    check_keys(s, "dataset.synthetic",
               {"n", "d", "noise_sd", "treat_fraction", "rho", "te_scale"});
    cfg.source.is_synthetic = true;
    cfg.source.synthetic.n = get_count(s, "n", cfg.source.synthetic.n);
    cfg.source.synthetic.d = get_count(s, "d", cfg.source.synthetic.d);
    cfg.source.synthetic.noise_sd =
        get_real(s, "noise_sd", cfg.source.synthetic.noise_sd);
    cfg.source.synthetic.treat_fraction =
        get_real(s, "treat_fraction", cfg.source.synthetic.treat_fraction);
    cfg.source.synthetic.rho = get_real(s, "rho", cfg.source.synthetic.rho);
    cfg.source.synthetic.te_scale =
        get_real(s, "te_scale", cfg.source.synthetic.te_scale);
  } else {
    const json& c = ds.at("csv");
    check_keys(c, "dataset.csv",
               {"path", "features", "treatment", "outcome", "delimiter",
                "outcome_direction", "known_propensity"});
    cfg.source.is_synthetic = false;
    cfg.source.csv_path = get_text(c, "path", "");
    if (cfg.source.csv_path.empty()) fail("config: dataset.csv.path is required");
    if (!c.contains("features") || !c.at("features").is_array())
      fail("config: dataset.csv.features must be an array of column names");
    for (const auto& f : c.at("features")) {
      if (!f.is_string()) fail("config: feature names must be strings");
      cfg.source.schema.feature_columns.push_back(f.get<std::string>());
    }
    cfg.source.schema.treatment_column = get_text(c, "treatment", "W");
    cfg.source.schema.outcome_column = get_text(c, "outcome", "Y");
    const std::string delim = get_text(c, "delimiter", ",");
    if (delim.size() != 1) fail("config: delimiter must be one character");
    cfg.source.schema.delimiter = delim[0];
    cfg.source.direction =
        direction_from_name(get_text(c, "outcome_direction", "higher_is_better"));
    if (c.contains("known_propensity")) {
      const double p = get_real(c, "known_propensity", 0.5);
      if (!(p > 0.0 && p < 1.0))
        fail("config: known_propensity must lie in (0, 1)");
      cfg.source.known_propensity = p;
    }
  }

  if (root.contains("seed")) {
    if (!root.at("seed").is_number_unsigned())
      fail("config: 'seed' must be a non-negative integer");
    cfg.sweep.seed = root.at("seed").get<std::uint64_t>();
  }
  cfg.out_dir = get_text(root, "out_dir", cfg.out_dir);
  cfg.window = get_count(root, "window", cfg.window);
  if (cfg.window < 2) fail("config: window must be at least 2");

  if (root.contains("split")) {
    const json& s = root.at("split");
    check_keys(s, "split", {"train_fraction"});
    cfg.sweep.train_fraction =
        get_real(s, "train_fraction", cfg.sweep.train_fraction);
  }

  if (root.contains("pipeline")) {
    const json& p = root.at("pipeline");
    check_keys(p, "pipeline", {"n_folds", "propensity_mode", "clip_bounds"});
    cfg.sweep.pipeline.n_folds =
        get_count(p, "n_folds", cfg.sweep.pipeline.n_folds);
    const std::string mode = get_text(p, "propensity_mode", "estimated_clipped");
    if (mode == "estimated_clipped")
      cfg.sweep.pipeline.propensity_mode = PropensityMode::estimated_clipped;
    else if (mode == "uniform")
      cfg.sweep.pipeline.propensity_mode = PropensityMode::uniform;
    else
      fail("config: unknown propensity_mode '" + mode + "'");
    if (p.contains("clip_bounds")) {
      const json& cb = p.at("clip_bounds");
      if (!cb.is_array() || cb.size() != 2 || !cb[0].is_number() ||
          !cb[1].is_number())
        fail("config: clip_bounds must be [lo, hi]");
      cfg.sweep.pipeline.clip_lo = cb[0].get<double>();
      cfg.sweep.pipeline.clip_hi = cb[1].get<double>();
      if (!(cfg.sweep.pipeline.clip_lo > 0.0 &&
            cfg.sweep.pipeline.clip_lo < cfg.sweep.pipeline.clip_hi &&
            cfg.sweep.pipeline.clip_hi < 1.0))
        fail("config: clip_bounds must satisfy 0 < lo < hi < 1");
    }
  }

  if (root.contains("learners")) {
    const json& l = root.at("learners");
    check_keys(l, "learners", {"outcome", "propensity", "risk", "cate"});
    if (l.contains("outcome"))
      cfg.sweep.pipeline.outcome = parse_learner(
          l.at("outcome"), "learners.outcome", cfg.sweep.pipeline.outcome);
    if (l.contains("propensity"))
      cfg.sweep.pipeline.propensity =
          parse_learner(l.at("propensity"), "learners.propensity",
                        cfg.sweep.pipeline.propensity);
    if (l.contains("risk"))
      cfg.sweep.risk_learner =
          parse_learner(l.at("risk"), "learners.risk", cfg.sweep.risk_learner);
    if (l.contains("cate"))
      cfg.sweep.cate_learner =
          parse_learner(l.at("cate"), "learners.cate", cfg.sweep.cate_learner);
  }

  if (root.contains("experiment")) {
    const json& e = root.at("experiment");
    check_keys(e, "experiment",
               {"k_values", "policies", "welfare", "budget", "te_mode",
                "bootstrap_reps", "nash_scaling"});
    if (e.contains("k_values")) {
      if (!e.at("k_values").is_array())
        fail("config: experiment.k_values must be an array");
      cfg.sweep.k_values.clear();
      for (const auto& k : e.at("k_values")) {
        if (!k.is_number()) fail("config: k values must be numbers");
        cfg.sweep.k_values.push_back(k.get<double>());
      }
    }
    if (e.contains("policies")) {
      if (!e.at("policies").is_array())
        fail("config: experiment.policies must be an array");
      cfg.sweep.policies.clear();
      for (const auto& p : e.at("policies")) {
        if (!p.is_string()) fail("config: policy names must be strings");
        cfg.sweep.policies.push_back(policy_kind_from_name(p.get<std::string>()));
      }
    }
    if (e.contains("welfare")) {
      if (!e.at("welfare").is_array())
        fail("config: experiment.welfare must be an array");
      cfg.sweep.welfare.clear();
      for (const auto& w : e.at("welfare")) {
        check_keys(w, "experiment.welfare entry", {"kind", "alpha"});
        WelfareSpec spec;
        const std::string kind = get_text(w, "kind", "utilitarian");
        if (kind == "utilitarian") spec.kind = WelfareKind::utilitarian;
        else if (kind == "weighted_utilitarian")
          spec.kind = WelfareKind::weighted_utilitarian;
        else if (kind == "nash") spec.kind = WelfareKind::nash;
        else fail("config: unknown welfare kind '" + kind + "'");
        spec.alpha = get_real(w, "alpha", 0.0);
        if (spec.kind == WelfareKind::weighted_utilitarian &&
            (spec.alpha < 0.0 || spec.alpha > alpha_cap() + 1e-12))
          fail("config: welfare alpha outside [0, " +
               std::to_string(alpha_cap()) + "]");
        cfg.sweep.welfare.push_back(spec);
      }
    }
    cfg.sweep.budget = get_real(e, "budget", cfg.sweep.budget);
    if (e.contains("te_mode")) {
      const std::string mode = get_text(e, "te_mode", "predicted");
      if (mode == "predicted") cfg.sweep.te_mode = TeMode::predicted;
      else if (mode == "oracle_pseudo") cfg.sweep.te_mode = TeMode::oracle_pseudo;
      else fail("config: unknown te_mode '" + mode + "'");
    }
    cfg.sweep.bootstrap_reps =
        get_count(e, "bootstrap_reps", cfg.sweep.bootstrap_reps);
    if (e.contains("nash_scaling")) {
      const std::string scaling = get_text(e, "nash_scaling", "additive");
      if (scaling == "additive")
        cfg.sweep.nash_scaling = NashScaling::additive;
      else if (scaling == "multiplicative")
        cfg.sweep.nash_scaling = NashScaling::multiplicative;
      else
        fail("config: unknown nash_scaling '" + scaling + "'");
    }
  }
  return cfg;
}

}  // namespace

RunConfig parse_run_config(const std::string& json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const std::exception& e) {
    fail(std::string("config: invalid JSON: ") + e.what());
  }
  return parse_json(root);
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail("cannot open config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_run_config(buf.str());
}

std::string effective_config_text(const RunConfig& cfg) {
  json root;
  json ds;
  if (cfg.source.is_synthetic) {
    json s;
    s["n"] = cfg.source.synthetic.n;
    s["d"] = cfg.source.synthetic.d;
    s["noise_sd"] = cfg.source.synthetic.noise_sd;
    s["treat_fraction"] = cfg.source.synthetic.treat_fraction;
    s["rho"] = cfg.source.synthetic.rho;
    s["te_scale"] = cfg.source.synthetic.te_scale;
    ds["synthetic"] = std::move(s);
  } else {
    json c;
    c["path"] = cfg.source.csv_path;
    c["features"] = cfg.source.schema.feature_columns;
    c["treatment"] = cfg.source.schema.treatment_column;
    c["outcome"] = cfg.source.schema.outcome_column;
    c["delimiter"] = std::string(1, cfg.source.schema.delimiter);
    c["outcome_direction"] = direction_name(cfg.source.direction);
    if (cfg.source.known_propensity)
      c["known_propensity"] = *cfg.source.known_propensity;
    ds["csv"] = std::move(c);
  }
  root["dataset"] = std::move(ds);
  root["seed"] = cfg.sweep.seed;
  root["out_dir"] = cfg.out_dir;
  root["window"] = cfg.window;
  root["split"]["train_fraction"] = cfg.sweep.train_fraction;

  json pipe;
  pipe["n_folds"] = cfg.sweep.pipeline.n_folds;
  pipe["propensity_mode"] =
      cfg.sweep.pipeline.propensity_mode == PropensityMode::estimated_clipped
          ? "estimated_clipped"
          : "uniform";
  pipe["clip_bounds"] = {cfg.sweep.pipeline.clip_lo, cfg.sweep.pipeline.clip_hi};
  root["pipeline"] = std::move(pipe);

  json learners;
  learners["outcome"] = learner_to_json(cfg.sweep.pipeline.outcome);
  learners["propensity"] = learner_to_json(cfg.sweep.pipeline.propensity);
  learners["risk"] = learner_to_json(cfg.sweep.risk_learner);
  learners["cate"] = learner_to_json(cfg.sweep.cate_learner);
  root["learners"] = std::move(learners);

  json exp;
  exp["k_values"] = cfg.sweep.k_values;
  json policies = json::array();
  for (PolicyKind p : cfg.sweep.policies) policies.push_back(policy_kind_name(p));
  exp["policies"] = std::move(policies);
  json welfare = json::array();
  for (const auto& w : cfg.sweep.welfare) {
    json entry;
    switch (w.kind) {
      case WelfareKind::utilitarian: entry["kind"] = "utilitarian"; break;
      case WelfareKind::weighted_utilitarian:
        entry["kind"] = "weighted_utilitarian";
        entry["alpha"] = w.alpha;
        break;
      case WelfareKind::nash: entry["kind"] = "nash"; break;
    }
    welfare.push_back(std::move(entry));
  }
  exp["welfare"] = std::move(welfare);
  exp["budget"] = cfg.sweep.budget;
  exp["te_mode"] =
      cfg.sweep.te_mode == TeMode::predicted ? "predicted" : "oracle_pseudo";
  exp["bootstrap_reps"] = cfg.sweep.bootstrap_reps;
  exp["nash_scaling"] = cfg.sweep.nash_scaling == NashScaling::additive
                            ? "additive"
                            : "multiplicative";
  root["experiment"] = std::move(exp);

  return root.dump(2) + "\n";
}

std::pair<Dataset, std::optional<GroundTruth>> materialize_dataset(
    const RunConfig& cfg) {
  if (cfg.source.is_synthetic) {
    SyntheticSpec spec = cfg.source.synthetic;
    spec.seed = cfg.sweep.seed;
    auto [ds, gt] = generate(spec);
    return {std::move(ds), std::move(gt)};
  }
  Dataset ds = load_csv(cfg.source.csv_path, cfg.source.schema,
                        cfg.source.direction);
  ds.known_propensity = cfg.source.known_propensity;
  return {std::move(ds), std::nullopt};
}

}  // namespace targetbench

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "targetbench/commands.hpp"
#include "targetbench/config.hpp"
#include "targetbench/stats.hpp"
#include "test_util.hpp"

using namespace targetbench;
namespace fs = std::filesystem;

namespace {

RunConfig base_config(const std::string& out_dir) {
  RunConfig cfg;
  cfg.source.is_synthetic = true;
  cfg.source.synthetic.n = 200;
  cfg.source.synthetic.d = 4;
  cfg.source.synthetic.rho = 0.5;
  cfg.sweep.seed = 19;
  cfg.sweep.bootstrap_reps = 50;
  LearnerSpec ridge;
  ridge.kind = LearnerKind::ridge_linear;
  cfg.sweep.pipeline.outcome = ridge;
  cfg.sweep.risk_learner = ridge;
  cfg.sweep.cate_learner = ridge;
  cfg.out_dir = out_dir;
  return cfg;
}

// Splits a CSV body into per-column vectors of doubles, skipping the header.
std::vector<std::vector<double>> read_columns(const std::string& path) {
  const std::string text = test_util::read_file(path);
  std::vector<std::vector<double>> cols;
  std::istringstream lines(text);
  std::string line;
  bool header = true;
  while (std::getline(lines, line)) {
    if (header) {
      header = false;
      continue;
    }
    std::istringstream cells(line);
    std::string cell;
    std::size_t j = 0;
    while (std::getline(cells, cell, ',')) {
      if (cols.size() <= j) cols.emplace_back();
      cols[j].push_back(std::stod(cell));
      ++j;
    }
  }
  return cols;
}

std::size_t line_count(const std::string& text) {
  return static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n'));
}

struct TempDir {
  std::string path;
  explicit TempDir(const std::string& stem) : path(test_util::temp_path(stem)) {}
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
};

}  // namespace

TEST_SUITE("cli_report") {

TEST_CASE("synth emits data, truth, and the resolved config") {
  TempDir dir("synth_out");
  RunConfig cfg = base_config(dir.path + "/nested/deeper");
  const std::vector<std::string> files = cmd_synth(cfg);
  REQUIRE(files.size() == 3);
  CHECK(fs::path(files[0]).filename() == "synthetic.csv");
  CHECK(fs::path(files[1]).filename() == "synthetic_truth.csv");
  CHECK(fs::path(files[2]).filename() == "effective_config.json");
  for (const auto& f : files) CHECK(fs::exists(f));

  // data file: header plus one line per row; truth file likewise
  CHECK(line_count(test_util::read_file(files[0])) == cfg.source.synthetic.n + 1);
  CHECK(line_count(test_util::read_file(files[1])) == cfg.source.synthetic.n + 1);

  const std::string first_data = test_util::read_file(files[0]);
  const std::string first_truth = test_util::read_file(files[1]);
  const std::vector<std::string> again = cmd_synth(cfg);
  CHECK(test_util::read_file(again[0]) == first_data);
  CHECK(test_util::read_file(again[1]) == first_truth);
}

TEST_CASE("synth refuses a csv source") {
  TempDir dir("synth_csv");
  RunConfig cfg = base_config(dir.path);
  cfg.source.is_synthetic = false;
  cfg.source.csv_path = "whatever.csv";
  CHECK_THROWS_WITH_AS(cmd_synth(cfg), doctest::Contains("synthetic"), Error);
}

TEST_CASE("curve output tracks the risk gradient") {
  TempDir dir("curve_out");
  RunConfig cfg = base_config(dir.path);
  cfg.source.synthetic.n = 1200;
  cfg.source.synthetic.rho = 1.0;
  cfg.source.synthetic.noise_sd = 0.5;
  const std::vector<std::string> files = cmd_curve(cfg);
  REQUIRE(files.size() == 3);
  CHECK(fs::path(files[0]).filename() == "curve.csv");
  CHECK(fs::path(files[1]).filename() == "curve.svg");

  const std::string csv = test_util::read_file(files[0]);
  CHECK(csv.rfind("b,tau_hat,sigma,ci_lo,ci_hi\n", 0) == 0);
  const auto cols = read_columns(files[0]);
  REQUIRE(cols.size() == 5);
  // evaluation split: half the rows, one curve point each
  CHECK(cols[0].size() == 600);
  CHECK(std::is_sorted(cols[0].begin(), cols[0].end()));
  // perfectly aligned effects: benefit must climb with risk
  CHECK(spearman(cols[0], cols[1]) > 0.9);

  const std::string svg = test_util::read_file(files[1]);
  CHECK(svg.find("<svg") != std::string::npos);
  CHECK(svg.find("baseline risk") != std::string::npos);
}

TEST_CASE("a zero effect yields a flat curve with a collapsed band") {
  TempDir dir("curve_flat");
  RunConfig cfg = base_config(dir.path);
  cfg.source.synthetic.n = 400;
  cfg.source.synthetic.noise_sd = 0.0;
  cfg.source.synthetic.te_scale = 0.0;
  LearnerSpec exact;
  exact.kind = LearnerKind::ridge_linear;
  exact.ridge_lambda = 0.0;
  cfg.sweep.pipeline.outcome = exact;
  cfg.sweep.risk_learner = exact;
  const std::vector<std::string> files = cmd_curve(cfg);
  const auto cols = read_columns(files[0]);
  REQUIRE(cols.size() == 5);
  for (std::size_t i = 0; i < cols[1].size(); ++i) {
    CHECK(std::abs(cols[1][i]) <= 1e-9);
    CHECK(cols[4][i] - cols[3][i] <= 1e-9);
  }
}

TEST_CASE("a failing run leaves no output directory behind") {
  TempDir dir("curve_err");
  RunConfig cfg = base_config(dir.path + "/sub");
  cfg.source.synthetic.n = 3;  // eval split cannot hold both arms
  CHECK_THROWS_AS(cmd_curve(cfg), Error);
  CHECK(!fs::exists(cfg.out_dir));
}

TEST_CASE("sweep emits tables and one plot per welfare") {
  TempDir dir("sweep_out");
  RunConfig cfg = base_config(dir.path);
  cfg.sweep.welfare = {WelfareSpec{},
                       WelfareSpec{WelfareKind::weighted_utilitarian, 1.5},
                       WelfareSpec{WelfareKind::nash, 0.0}};
  const std::vector<std::string> files = cmd_sweep(cfg);
  REQUIRE(files.size() == 6);
  CHECK(fs::path(files[0]).filename() == "sweep.json");
  CHECK(fs::path(files[1]).filename() == "sweep.csv");
  CHECK(fs::path(files[2]).filename() == "sweep_utilitarian.svg");
  CHECK(fs::path(files[3]).filename() == "sweep_weighted_1.5.svg");
  CHECK(fs::path(files[4]).filename() == "sweep_nash.svg");
  CHECK(fs::path(files[5]).filename() == "effective_config.json");

  // three welfares, three policies, one k: nine data rows plus the header
  const std::string csv = test_util::read_file(files[1]);
  CHECK(line_count(csv) == 10);

  const std::string first_json = test_util::read_file(files[0]);
  const std::string first_csv = csv;
  cmd_sweep(cfg);
  CHECK(test_util::read_file(files[0]) == first_json);
  CHECK(test_util::read_file(files[1]) == first_csv);
}

TEST_CASE("alpha emits one threshold column per k") {
  TempDir dir("alpha_out");
  RunConfig cfg = base_config(dir.path);
  cfg.sweep.k_values = {0.0, 0.05, 0.1, 0.2};
  const std::vector<std::string> files = cmd_alpha(cfg);
  REQUIRE(files.size() == 2);
  const std::string csv = test_util::read_file(files[0]);
  CHECK(csv.rfind("dataset,0%,5%,10%,20%\n", 0) == 0);
  CHECK(line_count(csv) == 2);
  CHECK(csv.find("synthetic,") != std::string::npos);
}

TEST_CASE("the effective config reproduces the run byte for byte") {
  TempDir dir("effective");
  RunConfig cfg = base_config(dir.path + "/first");
  cfg.sweep.k_values = {0.0, 0.2};
  const std::vector<std::string> files = cmd_sweep(cfg);
  const std::string effective = test_util::read_file(files.back());

  RunConfig reloaded = load_run_config(files.back());
  // the resolved text is a fixed point of the parser
  CHECK(effective_config_text(reloaded) == effective);

  reloaded.out_dir = dir.path + "/second";
  const std::vector<std::string> rerun = cmd_sweep(reloaded);
  CHECK(test_util::read_file(rerun[0]) == test_util::read_file(files[0]));
  CHECK(test_util::read_file(rerun[1]) == test_util::read_file(files[1]));
}

TEST_CASE("config parsing rejects unknown keys and missing datasets") {
  CHECK_THROWS_WITH_AS(parse_run_config("{\"bogus\": 1}"),
                       doctest::Contains("bogus"), Error);
  CHECK_THROWS_WITH_AS(parse_run_config("{}"), doctest::Contains("dataset"),
                       Error);
  CHECK_THROWS_WITH_AS(parse_run_config("not json at all"),
                       doctest::Contains("config"), Error);
  const std::string both =
      "{\"dataset\": {\"synthetic\": {\"n\": 10}, "
      "\"csv\": {\"path\": \"x.csv\", \"features\": [\"a\"]}}}";
  CHECK_THROWS_AS(parse_run_config(both), Error);
}

TEST_CASE("config files drive the same pipeline as in-memory configs") {
  TempDir dir("cfg_file");
  const std::string cfg_text =
      "{\n"
      "  \"dataset\": {\"synthetic\": {\"n\": 200, \"d\": 4, \"rho\": 0.5}},\n"
      "  \"seed\": 19,\n"
      "  \"out_dir\": \"" + dir.path + "/a\",\n"
      "  \"learners\": {\n"
      "    \"outcome\": {\"kind\": \"ridge_linear\"},\n"
      "    \"risk\": {\"kind\": \"ridge_linear\"},\n"
      "    \"cate\": {\"kind\": \"ridge_linear\"}\n"
      "  },\n"
      "  \"experiment\": {\"bootstrap_reps\": 50}\n"
      "}\n";
  const std::string cfg_path = test_util::temp_path("run_config.json");
  test_util::write_file(cfg_path, cfg_text);
  RunConfig from_file = load_run_config(cfg_path);
  std::remove(cfg_path.c_str());

  RunConfig in_memory = base_config(dir.path + "/b");
  const auto a = cmd_sweep(from_file);
  const auto b = cmd_sweep(in_memory);
  CHECK(test_util::read_file(a[1]) == test_util::read_file(b[1]));
}

}  // TEST_SUITE

#include <cstdint>
#include <exception>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "targetbench/commands.hpp"
#include "targetbench/parallel.hpp"

namespace {

struct CliOptions {
  std::string config_path;
  std::string out_dir;
  std::uint64_t seed = 0;
  std::size_t threads = 1;
};

void add_common_options(CLI::App* cmd, CliOptions& opt) {
  cmd->add_option("--config", opt.config_path, "path to the run configuration (JSON)")
      ->required();
  cmd->add_option("--out", opt.out_dir, "output directory (overrides the config)");
  cmd->add_option("--seed", opt.seed, "run seed (overrides the config)");
  cmd->add_option("--threads", opt.threads, "worker threads (default 1)");
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"targetbench: evaluate risk-based, effect-based, and random "
               "targeting policies on trial-shaped tabular data"};
  app.require_subcommand(1);

  CliOptions opt;
  CLI::App* synth = app.add_subcommand("synth", "generate a synthetic dataset with ground truth");
  CLI::App* curve = app.add_subcommand("curve", "estimate the benefit-by-risk curve");
  CLI::App* sweep = app.add_subcommand("sweep", "run the policy-value sweep over k");
  CLI::App* alpha = app.add_subcommand("alpha", "tabulate the weighted-welfare crossover alpha");
  for (CLI::App* cmd : {synth, curve, sweep, alpha}) add_common_options(cmd, opt);

  CLI11_PARSE(app, argc, argv);
  CLI::App* cmd = app.get_subcommands().front();

  try {
    targetbench::RunConfig cfg = targetbench::load_run_config(opt.config_path);
    if (cmd->count("--out") > 0) cfg.out_dir = opt.out_dir;
    if (cmd->count("--seed") > 0) cfg.sweep.seed = opt.seed;
    targetbench::set_thread_count(opt.threads);

    std::vector<std::string> files;
    if (cmd == synth) files = targetbench::cmd_synth(cfg);
    else if (cmd == curve) files = targetbench::cmd_curve(cfg);
    else if (cmd == sweep) files = targetbench::cmd_sweep(cfg);
    else files = targetbench::cmd_alpha(cfg);

    for (const std::string& f : files) std::cout << f << "\n";
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

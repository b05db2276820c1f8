#include <cstdlib>
#include <iostream>

#include <CLI11.hpp>

#include "levypot/harness.hpp"

int main(int argc, char** argv) {
  CLI::App app{"levypot: Monte Carlo potential theory experiments"};
  app.require_subcommand(1);
  auto* run_cmd = app.add_subcommand("run", "run the experiments of a config file");
  std::string config;
  std::optional<std::uint64_t> seed;
  double scale = 1.0;
  std::string out;
  std::string filter = "*";
  int threads = 0;
  bool timing = false;
  run_cmd->add_option("--config", config, "config file (JSON)")->required();
  run_cmd->add_option("--seed", seed, "override the run seed");
  run_cmd->add_option("--samples-scale", scale, "multiply every sample count")->check(CLI::PositiveNumber);
  run_cmd->add_option("--out", out, "output directory");
  run_cmd->add_option("--filter", filter, "experiment name glob");
  run_cmd->add_option("--threads", threads, "worker threads (0 = hardware)")->check(CLI::NonNegativeNumber);
  run_cmd->add_flag("--timing", timing, "fill the seconds column");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  levypot::RunOptions opts;
  if (const char* env = std::getenv("LEVYPOT_SEED"); env && !seed) {
    try {
      opts.seed = std::stoull(env);
    } catch (const std::exception&) {
      std::cerr << "LEVYPOT_SEED: not an unsigned integer\n";
      return 2;
    }
  }
  if (seed) opts.seed = seed;
  if (out.empty()) {
    const char* env = std::getenv("LEVYPOT_OUT");
    out = env ? env : "levypot-out";
  }
  opts.out = out;
  opts.samples_scale = scale;
  opts.filter = filter;
  opts.threads = threads;
  opts.timing = timing;

  try {
    const auto cfg = levypot::load_config(config);
    const auto record = levypot::run(cfg, opts);
    levypot::write_outputs(record, cfg, opts);
    for (const auto& e : record.experiments)
      std::cout << e.verdict << "  " << e.name << "  (" << e.op << ")" << (e.summary.empty() ? "" : "  ")
                << e.summary << "\n";
    std::cout << record.passed << " passed, " << record.failed << " failed, " << record.inconclusive
              << " inconclusive; results in " << opts.out.string() << "\n";
    return record.exit_code();
  } catch (const levypot::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}

#include <cstdio>
#include <exception>
#include <string>

#include <CLI11.hpp>

#include "mkdvlab/runner.hpp"

int main(int argc, char** argv) {
  CLI::App app{"mkdvlab - pseudo-spectral laboratory for the periodic complex mKdV"};
  app.set_version_flag("--version", mkdv::version_string());
  app.require_subcommand(1);

  std::string config_path;
  int workers = 1;
  std::uint64_t seed_flag = 0;
  bool seed_given = false;

  for (const char* name :
       {"sample", "evolve", "estar", "decay", "invariance", "converge"}) {
    auto* sub = app.add_subcommand(name);
    sub->add_option("--config", config_path, "experiment config (flat JSON)")
        ->required();
    sub->add_option("--workers", workers, "worker threads (1 = bit-exact reference)");
    sub->add_option("--seed", seed_flag, "seed override (highest precedence)")
        ->each([&](const std::string&) { seed_given = true; });
  }

  CLI11_PARSE(app, argc, argv);

  try {
    mkdv::RunConfig config = mkdv::load_config(config_path);
    const std::string sub = app.get_subcommands().front()->get_name();
    if (config.experiment.empty()) config.experiment = sub;
    if (config.experiment != sub)
      throw std::invalid_argument("config experiment '" + config.experiment +
                                  "' does not match subcommand '" + sub + "'");
    if (seed_given) config.seed = seed_flag;
    const mkdv::RunResult result = mkdv::run_experiment(config, workers);
    std::printf("%s\n", result.summary.dump(2).c_str());
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "fedsim/errors.hpp"
#include "fedsim/runner.hpp"

namespace {

struct CommonOpts {
  std::string config_path;
  std::string out_dir;
  bool seed_given = false;
  std::uint64_t seed = 0;
};

int run_kind(const std::string& kind, const CommonOpts& opts) {
  std::ifstream in(opts.config_path, std::ios::binary);
  if (!in) {
    std::cerr << "sim: cannot open config file '" << opts.config_path << "'\n";
    return 1;
  }
  std::stringstream buffer;
  buffer << in.rdbuf();

  fedsim::ExperimentConfig config = fedsim::parse_config(buffer.str());
  const fedsim::ExperimentKind requested =
      fedsim::experiment_kind_from_string(kind);
  if (config.kind != requested && config.kind != fedsim::ExperimentKind::train) {
    // A config written for one kind must not silently run as another.
    std::cerr << "sim: config declares kind '" << fedsim::to_string(config.kind)
              << "' but subcommand is '" << kind << "'\n";
    return 1;
  }
  config.kind = requested;
  if (opts.seed_given) config.sim.seed = opts.seed;
  if (!opts.out_dir.empty()) config.out_dir = opts.out_dir;
  return fedsim::run_experiment(config);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Seedable FedAvg simulator for multi-task linear regression"};
  app.require_subcommand(1);

  CommonOpts opts;
  const char* kinds[] = {"train", "finetune", "lowerbound", "concentration",
                         "sweep"};
  for (const char* kind : kinds) {
    CLI::App* sub = app.add_subcommand(kind);
    sub->add_option("--config", opts.config_path, "experiment config file")
        ->required();
    sub->add_option("--seed", opts.seed, "override the config seed")
        ->each([&opts](const std::string&) { opts.seed_given = true; });
    sub->add_option("--out", opts.out_dir, "output directory");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  try {
    return run_kind(app.get_subcommands().front()->get_name(), opts);
  } catch (const fedsim::ParseError& e) {
    std::cerr << "sim: config error: " << e.what() << '\n';
    return 1;
  } catch (const fedsim::SimError& e) {
    std::cerr << "sim: " << e.what() << '\n';
    return 1;
  }
}

// Command line front end: run, compare, oracle, decode.

#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "evoplc/config.hpp"
#include "evoplc/errors.hpp"
#include "evoplc/runner.hpp"

namespace {

using namespace evoplc;

struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> jobs;
  std::optional<std::string> out_dir;
  std::optional<std::size_t> generations;

  void apply(cli::RunConfig& cfg) const {
    if (seed) cfg.evolution.seed = *seed;
    if (jobs) cfg.evolution.jobs = *jobs;
    if (out_dir) cfg.output.dir = *out_dir;
    if (generations) cfg.evolution.generations = *generations;
  }
};

void setup_logging() {
  auto logger = spdlog::stderr_color_mt("evoplc");
  spdlog::set_default_logger(logger);
  spdlog::set_level(spdlog::level::info);
  if (const char* env = std::getenv("EVOPLC_LOG")) {
    const auto level = spdlog::level::from_str(env);
    // from_str maps unknown names to off; only accept "off" when asked for.
    if (level != spdlog::level::off || std::string(env) == "off") spdlog::set_level(level);
  }
}

cli::RunConfig load(const std::string& path, const Overrides& o) {
  auto cfg = cli::load_config(path);
  o.apply(cfg);
  if (const auto problems = cfg.problems(); !problems.empty()) {
    throw evoplc::ConfigError(fmt::format("invalid config after overrides: {}", problems.front()));
  }
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  setup_logging();

  CLI::App app{"Evolutionary synthesis of PLC control programs for a liquid tank station"};
  app.require_subcommand(1);

  Overrides o;
  std::vector<std::uint64_t> compare_seeds;
  auto add_common = [&](CLI::App* sub, bool evolution_flags) {
    sub->add_option("--jobs", o.jobs, "Parallel evaluation workers")->check(CLI::PositiveNumber);
    sub->add_option("--out-dir", o.out_dir, "Directory for emitted artifacts");
    if (evolution_flags) sub->add_option("--generations", o.generations, "Override the generation count");
  };

  std::string config_path;
  auto* run = app.add_subcommand("run", "Evolve a program and write its artifacts");
  run->add_option("config", config_path, "Run configuration (TOML)")->required()->check(CLI::ExistingFile);
  run->add_option("--seed", o.seed, "Override the random seed");
  add_common(run, true);

  std::string prior_path;
  std::string progressive_path;
  auto* compare = app.add_subcommand("compare", "Run prior and progressive modes on the same seeds");
  compare->add_option("prior", prior_path, "Prior-mode configuration")->required()->check(CLI::ExistingFile);
  compare->add_option("progressive", progressive_path, "Progressive-mode configuration")->required()->check(CLI::ExistingFile);
  compare->add_option("--seed", compare_seeds, "Seeds to run (repeatable); default: the prior config's seed");
  add_common(compare, true);

  auto* oracle = app.add_subcommand("oracle", "Enumerate the whole genome space and its exact front");
  oracle->add_option("config", config_path, "Run configuration (TOML)")->required()->check(CLI::ExistingFile);
  add_common(oracle, false);

  std::string genome_path;
  auto* decode = app.add_subcommand("decode", "Translate a genome table (JSON) into ST, IL and a summary");
  decode->add_option("genome", genome_path, "Genome table (JSON)")->required()->check(CLI::ExistingFile);
  decode->add_option("--out-dir", o.out_dir, "Directory for emitted artifacts");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? cli::kExitOk : cli::kExitUsage;
  }

  try {
    if (*run) {
      const auto report = cli::run(load(config_path, o));
      std::cout << fmt::format("best fitness {}, front size {}, {} files\n", report.best_fitness, report.front.size(),
                               report.files.size());
    } else if (*compare) {
      const auto prior = load(prior_path, o);
      const auto progressive = load(progressive_path, o);
      if (compare_seeds.empty()) compare_seeds.push_back(prior.evolution.seed);
      const auto report = cli::compare(prior, progressive, compare_seeds, o.out_dir.value_or(prior.output.dir.string()));
      std::cout << fmt::format("progressive covers prior {:.3f}, prior covers progressive {:.3f}\n",
                               report.progressive_covers_prior, report.prior_covers_progressive);
    } else if (*oracle) {
      const auto cfg = load(config_path, o);
      const auto result = cli::oracle(cfg, cfg.output.dir);
      std::cout << fmt::format("{} individuals, {} on the front\n", result.individuals.size(), result.front.size());
    } else if (*decode) {
      const auto files = cli::decode_file(genome_path, o.out_dir.value_or("."));
      for (const auto& f : files) std::cout << f << "\n";
    }
  } catch (const std::exception& e) {
    const int code = cli::exit_code_for_current_exception();
    spdlog::error("{}", e.what());
    return code;
  }
  return cli::kExitOk;
}

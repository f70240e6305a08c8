#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "evoplc/evaluate.hpp"
#include "evoplc/evolution.hpp"
#include "evoplc/plant.hpp"

namespace evoplc::cli {

struct OutputOptions {
  std::filesystem::path dir = "out";
  bool write_trace = true;
  bool write_cold_store = true;
};

// One TOML file, one reproducible experiment. Sections: [plant], [scenario],
// [genome], [evolution], [fitness], [constraints], [output].
struct RunConfig {
  std::string profile = "default-synthetic";
  plant::Scenario scenario = plant::Scenario::automatic();
  evolution::EvolutionConfig evolution;
  evaluate::ObjectiveSettings objectives;
  evaluate::FitnessParams fitness;
  evaluate::ConstraintSet constraints;
  OutputOptions output;

  // Empty when every nested invariant holds.
  std::vector<std::string> problems() const;
  evaluate::EvaluationSetup evaluation_setup() const;
};

// Relative paths inside the text (scenario files, output dir) resolve against
// base_dir. Throws ConfigError on syntax errors, unknown keys, wrong types or
// failed invariants, IoError when a referenced file cannot be read.
RunConfig parse_config(std::string_view text, const std::filesystem::path& base_dir = ".");
RunConfig load_config(const std::filesystem::path& path);

// Scenario file: optional `duration`, an optional `[plant]` table layered over
// `params`, and a `[[inputs]]` array of {t_start, B1, B2, B3}.
plant::Scenario parse_scenario(std::string_view text, const plant::PlantParams& params);

}  // namespace evoplc::cli

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "evoplc/config.hpp"
#include "evoplc/evolution.hpp"
#include "evoplc/oracle.hpp"

namespace evoplc::cli {

inline constexpr int kArtifactSchemaVersion = 1;

// Process exit codes of the command line tool.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitIo = 3;
inline constexpr int kExitEvolution = 4;

// Maps the exception currently being handled to an exit code.
int exit_code_for_current_exception();

struct RunReport {
  evolution::PaMode mode = evolution::PaMode::Prior;
  std::uint64_t seed = 0;
  std::size_t generations = 0;
  std::size_t evaluations = 0;
  double best_fitness = 0.0;  // 0 when no feasible individual survived
  std::optional<std::uint64_t> best_id;
  std::vector<evolution::EvaluatedIndividual> front;
  std::vector<std::string> files;  // relative to the output directory, sorted
};

// Evolution only, no files.
evolution::EvolutionResult run_evolution(const RunConfig& config);

// Feasible nondominated members of a population, in population order.
std::vector<evolution::EvaluatedIndividual> feasible_front(const evolution::Population& population);

// Knee pick: the front member with the highest fitness, older first on ties.
std::optional<evolution::EvaluatedIndividual> knee_point(std::span<const evolution::EvaluatedIndividual> front);

// Runs evolve and writes history.csv, objectives.csv, front.json and
// cold_store.csv, then program.st, program.il, summary.txt, genome.json and
// trace.csv for the selected individual (prior: fitness argmax, progressive:
// knee point, plus one front/member_<id>/ directory per front member), and
// finally report.json. On failure a FAILED marker is left behind.
RunReport run(const RunConfig& config);

struct ComparisonReport {
  std::size_t prior_rows = 0;
  std::size_t progressive_rows = 0;
  // Fraction of the other mode's feasible solutions that are dominated by a
  // feasible solution of this mode.
  double progressive_covers_prior = 0.0;
  double prior_covers_progressive = 0.0;
  std::vector<std::string> files;
};

// C(a, b): share of b dominated by some member of a. 0 when b is empty.
double coverage(std::span<const evaluate::ObjectiveVector> a, std::span<const evaluate::ObjectiveVector> b);

// Runs both modes once per seed and writes comparison.csv and
// comparison.json into out_dir. Throws ConfigError when plant or scenario
// differ.
ComparisonReport compare(const RunConfig& prior, const RunConfig& progressive, std::span<const std::uint64_t> seeds,
                         const std::filesystem::path& out_dir);

// Exhaustive evaluation of the configured genome space; writes
// oracle_objectives.csv and oracle_front.json.
OracleResult oracle(const RunConfig& config, const std::filesystem::path& out_dir);

// Table-style genome JSON to program.st, program.il and summary.txt.
std::vector<std::string> decode_file(const std::filesystem::path& genome_json, const std::filesystem::path& out_dir);

// Serialized forms shared by the artifact writers and their readers.
std::string objectives_csv(std::span<const evolution::EvaluatedIndividual> members,
                           std::span<const evolution::EvaluatedIndividual> front);
nlohmann::ordered_json front_json(std::span<const evolution::EvaluatedIndividual> front,
                                  evolution::PaMode mode, std::uint64_t seed);
std::string cold_store_csv(std::span<const evolution::ColdEntry> entries);

}  // namespace evoplc::cli

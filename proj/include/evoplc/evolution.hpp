#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "evoplc/evaluate.hpp"
#include "evoplc/genome.hpp"
#include "evoplc/random.hpp"

namespace evoplc::evolution {

// Prior: scalar fitness with truncation selection and elitism.
// Progressive: bounded archive of mutually nondominated feasible individuals.
enum class PaMode : std::uint8_t { Prior, Progressive };

enum class Direction : std::uint8_t { Minimize, Maximize };
enum class SelectionKey : std::uint8_t { Fitness, Transport, Energy, Code };

struct EvaluatedIndividual {
  genome::Individual individual;
  evaluate::ObjectiveVector objectives;
  std::optional<double> fitness;
  bool feasible = false;
};

struct Population {
  std::vector<EvaluatedIndividual> members;
  std::size_t capacity = 64;
};

struct EvolutionConfig {
  std::size_t population_size = 64;
  std::size_t generations = 200;
  std::size_t parents = 2;
  double mutation_rate = 0.05;
  std::size_t elitism = 2;
  PaMode mode = PaMode::Prior;
  std::uint64_t seed = 1;
  std::size_t jobs = 1;
  genome::GenomeBounds bounds;

  std::vector<std::string> problems() const;
};

// The `count` extremal feasible members under `key`; ties go to the older
// generation, then the lower id. Throws EmptyPopulation on an empty
// population. Infeasible members are never returned.
std::vector<EvaluatedIndividual> select(const Population& population, std::size_t count, Direction direction,
                                        SelectionKey key);

// Rung-wise union: every (output, mode) rung present in any parent is copied
// verbatim from one uniformly chosen parent that has it.
genome::Individual recombine(std::span<const genome::Individual> parents, Rng& rng,
                             const genome::GenomeBounds& bounds);

genome::Individual mutate(const genome::Individual& individual, double rate, const genome::GenomeBounds& bounds,
                          Rng& rng);

struct GenerationStats {
  std::size_t generation = 0;
  double best_fitness = 0.0;  // best feasible fitness, 0 while none is feasible
  double mean_fitness = 0.0;
  std::size_t front_size = 0;
  std::size_t feasible_count = 0;
  std::vector<evaluate::ObjectiveVector> front;
};

// Individuals that left the population. Kept for inspection only.
struct ColdEntry {
  std::uint64_t id = 0;
  std::uint32_t generation_born = 0;
  std::size_t removed_in = 0;
  evaluate::ObjectiveVector objectives;
  double fitness = 0.0;
  bool feasible = false;
  std::string reason;  // infeasible, dominated, crowded, displaced
};

struct EvolutionResult {
  Population population;
  std::vector<GenerationStats> history;  // generation 0 is the initial population
  std::vector<ColdEntry> cold_store;
  std::size_t evaluations = 0;
};

using EvaluateFn = std::function<evaluate::Evaluation(const genome::Individual&)>;

// Throws ConfigError when config.problems() is not empty.
EvolutionResult evolve(const EvolutionConfig& config, const EvaluateFn& evaluator,
                       std::optional<Population> initial = std::nullopt);

// Crowding distance over the three objectives; boundary points get +inf.
std::vector<double> crowding_distance(std::span<const evaluate::ObjectiveVector> points);

// generation,best_fitness,mean_fitness,front_size,feasible_count
std::string history_csv(std::span<const GenerationStats> history);

}  // namespace evoplc::evolution

#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "evoplc/evaluate.hpp"
#include "evoplc/genome.hpp"

namespace evoplc::cli {

inline constexpr std::uint64_t kOracleSpaceLimit = 1'000'000;

// Number of valid individuals with r_min..r_max rows, computed without
// enumerating them.
std::uint64_t space_size(const genome::GenomeBounds& bounds);

// Every valid individual within bounds, in a fixed order. Throws
// SpaceTooLarge above kOracleSpaceLimit.
std::vector<genome::Individual> enumerate_space(const genome::GenomeBounds& bounds);

struct OracleResult {
  std::vector<genome::Individual> individuals;
  std::vector<evaluate::Evaluation> evaluations;  // parallel to individuals
  std::vector<std::size_t> front;                 // indices of the feasible nondominated set
};

// Exhaustive ground truth: evaluates the whole space with `evaluator` (whose
// bounds must match) and extracts the exact front over feasible individuals.
OracleResult enumerate_oracle(const evaluate::Evaluator& evaluator, std::size_t jobs = 1);

}  // namespace evoplc::cli

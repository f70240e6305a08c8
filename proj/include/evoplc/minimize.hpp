#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "evoplc/expr.hpp"

namespace evoplc::codegen {

// Product term over the six inputs. Bit i of `care` marks InputSignal i as
// present; the matching bit of `value` gives its polarity.
struct Cube {
  std::uint8_t care = 0;
  std::uint8_t value = 0;

  std::size_t literal_count() const;
  TruthTable table() const;

  friend auto operator<=>(const Cube&, const Cube&) = default;
};

// All prime implicants of `on_set`.
std::vector<Cube> prime_implicants(TruthTable on_set);

// Exact two-level minimization: a cover with the fewest cubes, then the
// fewest literals; among equal-cost covers the lexicographically smallest
// sorted cube list is returned, so equal functions give equal covers.
std::vector<Cube> minimize_sop(TruthTable on_set);

TruthTable cover_table(std::span<const Cube> cover);

// "NOT S3 AND B1", "NOT S2 OR (S1 AND B1)", "TRUE", "FALSE".
std::string render_sop(std::span<const Cube> cover);

}  // namespace evoplc::codegen

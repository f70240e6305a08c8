#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "evoplc/expr.hpp"
#include "evoplc/random.hpp"
#include "evoplc/signals.hpp"

namespace evoplc::genome {

enum class Operator : std::uint8_t { Assign, And, Or };
enum class Mode : std::uint8_t { Automatic, Manual };

// Operator alphabet available to continuation rows. `Paper` restricts the
// search to the conjunction-only tables.
enum class OperatorSet : std::uint8_t { Paper, Full };

// One line of the program table. A row with an output opens a rung; a row
// without one extends the rung above it.
struct GenomeRow {
  std::optional<OutputSignal> output;
  InputSignal input = InputSignal::S1;
  Operator op = Operator::Assign;
  bool negated = false;
  Mode mode = Mode::Automatic;

  bool opens_rung() const { return output.has_value(); }
  Literal literal() const { return {input, negated}; }

  friend bool operator==(const GenomeRow&, const GenomeRow&) = default;
};

struct GenomeBounds {
  std::size_t r_min = 4;
  std::size_t r_max = 16;
  OperatorSet operators = OperatorSet::Full;
};

struct Individual {
  std::vector<GenomeRow> rows;
  std::uint64_t id = 0;
  std::uint32_t generation_born = 0;
};

// Genome equality ignores bookkeeping (id, generation).
inline bool same_rows(const Individual& a, const Individual& b) { return a.rows == b.rows; }

enum class ViolationKind : std::uint8_t {
  Empty,
  TooManyRows,
  FirstRowOpensNothing,
  OpenerNotAssign,
  ContinuationNotConnective,
  OperatorNotAllowed,
  ModeMismatch,
  DuplicateRung,
};

struct Violation {
  std::size_t row = 0;
  ViolationKind kind = ViolationKind::Empty;
  std::string message;
};

std::vector<Violation> validate(const Individual& individual, const GenomeBounds& bounds = {});

// Rows [begin, end) of one rung.
struct RungSpan {
  std::size_t begin = 0;
  std::size_t end = 0;
  OutputSignal output = OutputSignal::P1;
  Mode mode = Mode::Automatic;

  std::size_t size() const { return end - begin; }
};

// Splits rows into rungs. Throws DecodeError on a continuation row that has
// no open rung.
std::vector<RungSpan> rung_spans(std::span<const GenomeRow> rows);

// Left-associative fold of a rung's literals, computed on whole tables.
TruthTable rung_table(std::span<const GenomeRow> rung_rows);

struct RungExpression {
  OutputSignal target = OutputSignal::P1;
  Mode mode = Mode::Automatic;
  Expr expr;
  // Constant-false rung standing in for an output the genome never assigns.
  bool implicit = false;
};

Individual random_individual(Rng& rng, const GenomeBounds& bounds);

std::vector<RungExpression> decode(const Individual& individual);

// Inverse of decode for left-deep literal chains; implicit rungs are skipped.
// Throws DecodeError when an expression is not a left-deep chain.
std::vector<GenomeRow> encode(std::span<const RungExpression> rungs);

// Rows left after priority resolution and redundancy elimination.
std::size_t effective_row_count(const Individual& individual);

// The seven-row automatic-mode controller of the laboratory station:
//   P1 = NOT S3 AND B1, P2 = S2 AND B1, P3 = S1 AND B1, L1 = B1.
Individual reference_controller();

}  // namespace evoplc::genome

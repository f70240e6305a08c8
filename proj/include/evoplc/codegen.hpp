#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "evoplc/genome.hpp"
#include "evoplc/minimize.hpp"

namespace evoplc::codegen {

using genome::Individual;
using genome::Mode;

// Later rungs overwrite earlier ones for the same output and mode, as in a
// PLC scan; the earlier duplicates are removed. Also drops leading rows that
// extend no rung and realigns continuation rows with their rung's mode.
Individual resolve_priority(const Individual& individual);

// Removes rows that do not change their rung's truth table, deletes
// contradictory rungs and rewrites tautologies as `x OR NOT x`.
Individual simplify(const Individual& individual);

// Stable sort of rungs by (mode, output).
Individual canonical_order(const Individual& individual);

// Comment lines placed at the top of emitted files.
using Provenance = std::vector<std::pair<std::string, std::string>>;

// One statement per output: a plain assignment, or an IF on B1 choosing
// between the automatic and manual expression. A missing branch is FALSE.
struct OutputStatement {
  OutputSignal output = OutputSignal::P1;
  std::optional<Expr> automatic;
  std::optional<Expr> manual;

  bool implicit() const { return !automatic && !manual; }
};

struct StructuredTextProgram {
  Provenance provenance;
  std::vector<OutputStatement> statements;  // P1, P2, P3, L1

  std::string text() const;
};

// Operators bind NOT > AND > OR; parentheses are added only where the left
// associative tree needs them.
std::string render_st_expr(const Expr& e);

StructuredTextProgram emit_structured_text(const Individual& individual, Provenance provenance = {});

std::string emit_instruction_list(const Individual& individual, const Provenance& provenance = {});

struct OutputBehavior {
  OutputSignal output = OutputSignal::P1;
  Mode mode = Mode::Automatic;
  bool implicit = false;
  TruthTable table = kTableFalse;
  std::vector<Cube> cover;
  std::string expression;
  std::string sentence;
};

struct BehaviorSummary {
  std::vector<OutputBehavior> entries;

  const OutputBehavior* find(OutputSignal output, Mode mode = Mode::Automatic) const;
  std::string text(const Provenance& provenance = {}) const;
};

BehaviorSummary derive_behavior_summary(const Individual& individual);

}  // namespace evoplc::codegen

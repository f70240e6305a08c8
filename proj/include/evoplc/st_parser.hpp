#pragma once

#include <array>
#include <optional>
#include <string_view>
#include <vector>

#include "evoplc/genome.hpp"

namespace evoplc::codegen {

// The statement forms produced by emit_structured_text:
//   <out> := <expr>;
//   IF [NOT] B1 THEN <out> := <expr>; [ELSE <out> := <expr>;] END_IF;
struct StStatement {
  enum class Guard : std::uint8_t { None, B1, NotB1 };

  OutputSignal target = OutputSignal::P1;
  Guard guard = Guard::None;
  Expr then_expr;
  std::optional<Expr> else_expr;
};

struct ParsedProgram {
  std::vector<StStatement> statements;

  // Runs the statements in order on one input image, outputs starting FALSE.
  std::array<bool, kOutputCount> execute(std::size_t image) const;

  // Rungs in (mode, output) order plus implicit FALSE rungs for outputs that
  // carry no expression, mirroring genome::decode.
  std::vector<genome::RungExpression> rungs() const;
};

// Throws ParseError with a line number on malformed input.
ParsedProgram parse_structured_text(std::string_view text);

// De Morgan push-down; literals absorb the negation.
Expr negate(const Expr& e);

}  // namespace evoplc::codegen

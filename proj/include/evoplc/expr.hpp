#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "evoplc/signals.hpp"

namespace evoplc {

// Bit k holds the value of a boolean function under input image k, where bit
// i of k is the level of InputSignal i.
using TruthTable = std::uint64_t;

inline constexpr TruthTable kTableFalse = 0;
inline constexpr TruthTable kTableTrue = ~TruthTable{0};

constexpr TruthTable input_table(InputSignal s) {
  TruthTable t = 0;
  for (std::size_t k = 0; k < kImageCount; ++k) {
    if ((k >> index(s)) & 1U) t |= TruthTable{1} << k;
  }
  return t;
}

constexpr bool table_at(TruthTable t, std::size_t image) { return (t >> image) & 1U; }

struct Literal {
  InputSignal input = InputSignal::S1;
  bool negated = false;

  friend bool operator==(const Literal&, const Literal&) = default;
};

constexpr TruthTable literal_table(Literal l) {
  const TruthTable t = input_table(l.input);
  return l.negated ? ~t : t;
}

// Boolean expression tree over input literals. Binary nodes always hold
// exactly two children.
class Expr {
 public:
  enum class Kind : std::uint8_t { False, True, Lit, And, Or };

  Expr() = default;

  static Expr constant(bool value);
  static Expr literal(Literal l);
  static Expr conjunction(Expr lhs, Expr rhs);
  static Expr disjunction(Expr lhs, Expr rhs);

  Kind kind() const { return kind_; }
  const Literal& lit() const { return lit_; }
  const std::vector<Expr>& children() const { return children_; }
  bool is_binary() const { return kind_ == Kind::And || kind_ == Kind::Or; }

  // Evaluated node by node; intentionally not routed through truth tables.
  bool eval(std::size_t image) const;
  TruthTable truth_table() const;
  std::size_t literal_count() const;

  friend bool operator==(const Expr&, const Expr&) = default;

 private:
  Kind kind_ = Kind::False;
  Literal lit_{};
  std::vector<Expr> children_;
};

// Debug rendering with explicit parentheses on every binary node.
std::string to_string(const Expr& e);

}  // namespace evoplc

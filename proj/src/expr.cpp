#include "evoplc/expr.hpp"

namespace evoplc {

Expr Expr::constant(bool value) {
  Expr e;
  e.kind_ = value ? Kind::True : Kind::False;
  return e;
}

Expr Expr::literal(Literal l) {
  Expr e;
  e.kind_ = Kind::Lit;
  e.lit_ = l;
  return e;
}

Expr Expr::conjunction(Expr lhs, Expr rhs) {
  Expr e;
  e.kind_ = Kind::And;
  e.children_.reserve(2);
  e.children_.push_back(std::move(lhs));
  e.children_.push_back(std::move(rhs));
  return e;
}

Expr Expr::disjunction(Expr lhs, Expr rhs) {
  Expr e;
  e.kind_ = Kind::Or;
  e.children_.reserve(2);
  e.children_.push_back(std::move(lhs));
  e.children_.push_back(std::move(rhs));
  return e;
}

bool Expr::eval(std::size_t image) const {
  switch (kind_) {
    case Kind::False:
      return false;
    case Kind::True:
      return true;
    case Kind::Lit:
      return (((image >> index(lit_.input)) & 1U) != 0) != lit_.negated;
    case Kind::And:
      return children_[0].eval(image) && children_[1].eval(image);
    case Kind::Or:
      return children_[0].eval(image) || children_[1].eval(image);
  }
  return false;
}

TruthTable Expr::truth_table() const {
  TruthTable t = 0;
  for (std::size_t k = 0; k < kImageCount; ++k) {
    if (eval(k)) t |= TruthTable{1} << k;
  }
  return t;
}

std::size_t Expr::literal_count() const {
  if (kind_ == Kind::Lit) return 1;
  std::size_t n = 0;
  for (const auto& c : children_) n += c.literal_count();
  return n;
}

std::string to_string(const Expr& e) {
  switch (e.kind()) {
    case Expr::Kind::False:
      return "FALSE";
    case Expr::Kind::True:
      return "TRUE";
    case Expr::Kind::Lit:
      return (e.lit().negated ? "~" : "") + std::string(name(e.lit().input));
    case Expr::Kind::And:
      return "(" + to_string(e.children()[0]) + " & " + to_string(e.children()[1]) + ")";
    case Expr::Kind::Or:
      return "(" + to_string(e.children()[0]) + " | " + to_string(e.children()[1]) + ")";
  }
  return {};
}

}  // namespace evoplc

#include "evoplc/st_parser.hpp"

#include <algorithm>
#include <cctype>
#include <string>

#include <fmt/format.h>

#include "evoplc/errors.hpp"

namespace evoplc::codegen {

Expr negate(const Expr& e) {
  switch (e.kind()) {
    case Expr::Kind::False:
      return Expr::constant(true);
    case Expr::Kind::True:
      return Expr::constant(false);
    case Expr::Kind::Lit:
      return Expr::literal({e.lit().input, !e.lit().negated});
    case Expr::Kind::And:
      return Expr::disjunction(negate(e.children()[0]), negate(e.children()[1]));
    case Expr::Kind::Or:
      return Expr::conjunction(negate(e.children()[0]), negate(e.children()[1]));
  }
  return e;
}

namespace {

struct Token {
  enum class Kind { Word, Assign, Semicolon, LParen, RParen, End } kind = Kind::End;
  std::string text;  // upper-cased for words
  int line = 1;
};

std::vector<Token> tokenize(std::string_view src) {
  std::vector<Token> out;
  int line = 1;
  std::size_t i = 0;
  while (i < src.size()) {
    const char c = src[i];
    if (c == '\n') {
      ++line;
      ++i;
    } else if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
    } else if (src.substr(i, 2) == "(*") {
      const auto close = src.find("*)", i + 2);
      if (close == std::string_view::npos) throw ParseError(fmt::format("line {}: unterminated comment", line));
      line += static_cast<int>(std::count(src.begin() + static_cast<std::ptrdiff_t>(i),
                                          src.begin() + static_cast<std::ptrdiff_t>(close), '\n'));
      i = close + 2;
    } else if (src.substr(i, 2) == ":=") {
      out.push_back({Token::Kind::Assign, ":=", line});
      i += 2;
    } else if (c == ';') {
      out.push_back({Token::Kind::Semicolon, ";", line});
      ++i;
    } else if (c == '(') {
      out.push_back({Token::Kind::LParen, "(", line});
      ++i;
    } else if (c == ')') {
      out.push_back({Token::Kind::RParen, ")", line});
      ++i;
    } else if (std::isalnum(static_cast<unsigned char>(c)) || c == '_') {
      std::string word;
      while (i < src.size() && (std::isalnum(static_cast<unsigned char>(src[i])) || src[i] == '_')) {
        word += static_cast<char>(std::toupper(static_cast<unsigned char>(src[i])));
        ++i;
      }
      out.push_back({Token::Kind::Word, std::move(word), line});
    } else {
      throw ParseError(fmt::format("line {}: unexpected character '{}'", line, c));
    }
  }
  out.push_back({Token::Kind::End, "", line});
  return out;
}

class Parser {
 public:
  explicit Parser(std::vector<Token> tokens) : tokens_(std::move(tokens)) {}

  ParsedProgram program() {
    ParsedProgram p;
    while (peek().kind != Token::Kind::End) p.statements.push_back(statement());
    return p;
  }

 private:
  const Token& peek() const { return tokens_[pos_]; }
  const Token& next() { return tokens_[pos_++]; }

  [[noreturn]] void fail(const std::string& what) const {
    throw ParseError(fmt::format("line {}: {} near '{}'", peek().line, what, peek().text));
  }

  bool accept_word(std::string_view w) {
    if (peek().kind == Token::Kind::Word && peek().text == w) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect_word(std::string_view w) {
    if (!accept_word(w)) fail(fmt::format("expected {}", w));
  }

  void expect(Token::Kind k, std::string_view what) {
    if (peek().kind != k) fail(fmt::format("expected {}", what));
    ++pos_;
  }

  std::pair<OutputSignal, Expr> assignment() {
    if (peek().kind != Token::Kind::Word) fail("expected an output name");
    const auto out = parse_output(peek().text);
    if (!out) fail("unknown output");
    ++pos_;
    expect(Token::Kind::Assign, ":=");
    Expr e = expr();
    expect(Token::Kind::Semicolon, ";");
    return {*out, std::move(e)};
  }

  StStatement statement() {
    StStatement s;
    if (!accept_word("IF")) {
      auto [target, e] = assignment();
      s.target = target;
      s.then_expr = std::move(e);
      return s;
    }
    s.guard = accept_word("NOT") ? StStatement::Guard::NotB1 : StStatement::Guard::B1;
    expect_word("B1");
    expect_word("THEN");
    auto [target, then_expr] = assignment();
    s.target = target;
    s.then_expr = std::move(then_expr);
    if (accept_word("ELSE")) {
      auto [else_target, else_expr] = assignment();
      if (else_target != target) fail("both branches must assign the same output");
      s.else_expr = std::move(else_expr);
    }
    expect_word("END_IF");
    expect(Token::Kind::Semicolon, ";");
    return s;
  }

  Expr expr() {
    Expr lhs = conjunction();
    while (accept_word("OR")) lhs = Expr::disjunction(std::move(lhs), conjunction());
    return lhs;
  }

  Expr conjunction() {
    Expr lhs = unary();
    while (accept_word("AND")) lhs = Expr::conjunction(std::move(lhs), unary());
    return lhs;
  }

  Expr unary() {
    if (accept_word("NOT")) return negate(unary());
    return primary();
  }

  Expr primary() {
    if (peek().kind == Token::Kind::LParen) {
      ++pos_;
      Expr e = expr();
      expect(Token::Kind::RParen, ")");
      return e;
    }
    if (accept_word("TRUE")) return Expr::constant(true);
    if (accept_word("FALSE")) return Expr::constant(false);
    if (peek().kind == Token::Kind::Word) {
      if (const auto in = parse_input(peek().text)) {
        ++pos_;
        return Expr::literal({*in, false});
      }
    }
    fail("expected an input, constant or '('");
  }

  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
};

bool is_false(const Expr& e) { return e.kind() == Expr::Kind::False; }

}  // namespace

ParsedProgram parse_structured_text(std::string_view text) { return Parser(tokenize(text)).program(); }

std::array<bool, kOutputCount> ParsedProgram::execute(std::size_t image) const {
  std::array<bool, kOutputCount> out{};
  const bool b1 = (image >> index(InputSignal::B1)) & 1U;
  for (const auto& s : statements) {
    const bool take_then = s.guard == StStatement::Guard::None || (s.guard == StStatement::Guard::B1) == b1;
    if (take_then) {
      out[index(s.target)] = s.then_expr.eval(image);
    } else if (s.else_expr) {
      out[index(s.target)] = s.else_expr->eval(image);
    }
  }
  return out;
}

std::vector<genome::RungExpression> ParsedProgram::rungs() const {
  using genome::Mode;
  std::vector<genome::RungExpression> out;
  auto add = [&out](OutputSignal target, Mode mode, const Expr& e) {
    if (!is_false(e)) out.push_back({target, mode, e, false});
  };
  for (const auto& s : statements) {
    switch (s.guard) {
      case StStatement::Guard::None:
        add(s.target, Mode::Automatic, s.then_expr);
        break;
      case StStatement::Guard::B1:
        add(s.target, Mode::Automatic, s.then_expr);
        if (s.else_expr) add(s.target, Mode::Manual, *s.else_expr);
        break;
      case StStatement::Guard::NotB1:
        add(s.target, Mode::Manual, s.then_expr);
        if (s.else_expr) add(s.target, Mode::Automatic, *s.else_expr);
        break;
    }
  }
  std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    if (a.mode != b.mode) return a.mode < b.mode;
    return a.target < b.target;
  });
  std::array<bool, kOutputCount> assigned{};
  for (const auto& r : out) assigned[index(r.target)] = true;
  for (auto o : kAllOutputs) {
    if (!assigned[index(o)]) out.push_back({o, Mode::Automatic, Expr::constant(false), true});
  }
  return out;
}

}  // namespace evoplc::codegen

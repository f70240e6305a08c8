#include "evoplc/genome.hpp"

#include <array>
#include <fmt/format.h>
#include <set>
#include <utility>

#include "evoplc/codegen.hpp"
#include "evoplc/errors.hpp"

namespace evoplc::genome {

namespace {

std::string_view mode_tag(Mode m) { return m == Mode::Automatic ? "A" : "M"; }

using RungKey = std::pair<OutputSignal, Mode>;

constexpr std::array<Mode, 2> kModes = {Mode::Automatic, Mode::Manual};

}  // namespace

std::vector<Violation> validate(const Individual& individual, const GenomeBounds& bounds) {
  std::vector<Violation> out;
  const auto& rows = individual.rows;
  if (rows.empty()) {
    out.push_back({0, ViolationKind::Empty, "individual has no rows"});
    return out;
  }
  if (rows.size() > bounds.r_max) {
    out.push_back({bounds.r_max, ViolationKind::TooManyRows,
                   fmt::format("{} rows exceed the bound of {}", rows.size(), bounds.r_max)});
  }
  if (!rows.front().opens_rung()) {
    out.push_back({0, ViolationKind::FirstRowOpensNothing, "row 0 opens nothing"});
  }

  std::set<RungKey> seen;
  std::optional<Mode> rung_mode;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& row = rows[i];
    if (row.opens_rung()) {
      if (row.op != Operator::Assign) {
        out.push_back({i, ViolationKind::OpenerNotAssign,
                       fmt::format("row {} opens a rung but its operator is not assignment", i)});
      }
      if (!seen.insert({*row.output, row.mode}).second) {
        out.push_back({i, ViolationKind::DuplicateRung,
                       fmt::format("row {}: duplicate rung for {}/{}", i, name(*row.output),
                                   mode_tag(row.mode))});
      }
      rung_mode = row.mode;
      continue;
    }
    if (row.op == Operator::Assign) {
      out.push_back({i, ViolationKind::ContinuationNotConnective,
                     fmt::format("row {} extends a rung but uses assignment", i)});
    } else if (row.op == Operator::Or && bounds.operators == OperatorSet::Paper) {
      out.push_back({i, ViolationKind::OperatorNotAllowed,
                     fmt::format("row {}: OR is outside the configured operator set", i)});
    }
    if (rung_mode && row.mode != *rung_mode) {
      out.push_back({i, ViolationKind::ModeMismatch,
                     fmt::format("row {}: mode differs from the rung it extends", i)});
    }
  }
  return out;
}

std::vector<RungSpan> rung_spans(std::span<const GenomeRow> rows) {
  std::vector<RungSpan> spans;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].opens_rung()) {
      if (!spans.empty()) spans.back().end = i;
      spans.push_back({i, i + 1, *rows[i].output, rows[i].mode});
    } else if (spans.empty()) {
      throw DecodeError(fmt::format("row {} continues a rung but no rung is open", i));
    }
  }
  if (!spans.empty()) spans.back().end = rows.size();
  return spans;
}

TruthTable rung_table(std::span<const GenomeRow> rung_rows) {
  if (rung_rows.empty()) return kTableFalse;
  TruthTable t = literal_table(rung_rows.front().literal());
  for (const auto& row : rung_rows.subspan(1)) {
    const TruthTable lit = literal_table(row.literal());
    t = row.op == Operator::Or ? (t | lit) : (t & lit);
  }
  return t;
}

Individual random_individual(Rng& rng, const GenomeBounds& bounds) {
  const std::size_t r_max = std::max<std::size_t>(bounds.r_max, 1);
  const std::size_t r_min = std::clamp<std::size_t>(bounds.r_min, 1, r_max);
  const std::size_t n = r_min + uniform_index(rng, r_max - r_min + 1);

  Individual ind;
  ind.rows.reserve(n);
  std::set<RungKey> used;
  Mode current_mode = Mode::Automatic;

  for (std::size_t i = 0; i < n; ++i) {
    // Output slot: "none" is legal except on the first row; an output is
    // legal while at least one of its modes is still free.
    std::vector<std::optional<OutputSignal>> slots;
    if (i > 0) slots.emplace_back(std::nullopt);
    for (auto o : kAllOutputs) {
      if (!used.contains({o, Mode::Automatic}) || !used.contains({o, Mode::Manual})) slots.emplace_back(o);
    }
    GenomeRow row;
    row.output = slots[uniform_index(rng, slots.size())];
    row.input = kAllInputs[uniform_index(rng, kInputCount)];
    row.negated = coin(rng, 0.5);
    if (row.output) {
      std::vector<Mode> modes;
      for (auto m : kModes) {
        if (!used.contains({*row.output, m})) modes.push_back(m);
      }
      row.mode = modes[uniform_index(rng, modes.size())];
      row.op = Operator::Assign;
      used.insert({*row.output, row.mode});
      current_mode = row.mode;
    } else {
      row.mode = current_mode;
      row.op = bounds.operators == OperatorSet::Full && coin(rng, 0.5) ? Operator::Or : Operator::And;
    }
    ind.rows.push_back(row);
  }
  return ind;
}

namespace {

Expr rung_expr(std::span<const GenomeRow> rung_rows) {
  Expr e = Expr::literal(rung_rows.front().literal());
  for (const auto& row : rung_rows.subspan(1)) {
    Expr lit = Expr::literal(row.literal());
    e = row.op == Operator::Or ? Expr::disjunction(std::move(e), std::move(lit))
                               : Expr::conjunction(std::move(e), std::move(lit));
  }
  return e;
}

}  // namespace

std::vector<RungExpression> decode(const Individual& individual) {
  const std::span<const GenomeRow> rows{individual.rows};
  std::vector<RungExpression> rungs;
  std::array<bool, kOutputCount> assigned{};
  for (const auto& span : rung_spans(rows)) {
    rungs.push_back({span.output, span.mode, rung_expr(rows.subspan(span.begin, span.size())), false});
    assigned[index(span.output)] = true;
  }
  for (auto o : kAllOutputs) {
    if (!assigned[index(o)]) rungs.push_back({o, Mode::Automatic, Expr::constant(false), true});
  }
  return rungs;
}

namespace {

// Appends the literals of a left-deep chain; the first literal goes last.
void unfold_chain(const Expr& e, std::vector<std::pair<Operator, Literal>>& out) {
  switch (e.kind()) {
    case Expr::Kind::Lit:
      out.emplace_back(Operator::Assign, e.lit());
      return;
    case Expr::Kind::And:
    case Expr::Kind::Or: {
      const Expr& rhs = e.children()[1];
      if (rhs.kind() != Expr::Kind::Lit) throw DecodeError("expression is not a left-deep literal chain");
      out.emplace_back(e.kind() == Expr::Kind::And ? Operator::And : Operator::Or, rhs.lit());
      unfold_chain(e.children()[0], out);
      return;
    }
    default:
      throw DecodeError("constant expressions have no row encoding");
  }
}

}  // namespace

std::vector<GenomeRow> encode(std::span<const RungExpression> rungs) {
  std::vector<GenomeRow> rows;
  for (const auto& rung : rungs) {
    if (rung.implicit) continue;
    std::vector<std::pair<Operator, Literal>> chain;
    unfold_chain(rung.expr, chain);
    for (auto it = chain.rbegin(); it != chain.rend(); ++it) {
      GenomeRow row;
      row.input = it->second.input;
      row.negated = it->second.negated;
      row.op = it->first;
      row.mode = rung.mode;
      if (it == chain.rbegin()) row.output = rung.target;
      rows.push_back(row);
    }
  }
  return rows;
}

std::size_t effective_row_count(const Individual& individual) {
  return codegen::simplify(codegen::resolve_priority(individual)).rows.size();
}

Individual reference_controller() {
  using enum InputSignal;
  Individual ind;
  ind.rows = {
      {OutputSignal::P1, S3, Operator::Assign, true, Mode::Automatic},
      {std::nullopt, B1, Operator::And, false, Mode::Automatic},
      {OutputSignal::P2, S2, Operator::Assign, false, Mode::Automatic},
      {std::nullopt, B1, Operator::And, false, Mode::Automatic},
      {OutputSignal::P3, S1, Operator::Assign, false, Mode::Automatic},
      {std::nullopt, B1, Operator::And, false, Mode::Automatic},
      {OutputSignal::L1, B1, Operator::Assign, false, Mode::Automatic},
  };
  return ind;
}

}  // namespace evoplc::genome

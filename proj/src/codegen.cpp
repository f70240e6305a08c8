#include "evoplc/codegen.hpp"

#include <algorithm>
#include <array>
#include <set>

#include <fmt/format.h>

namespace evoplc::codegen {

using genome::GenomeRow;
using genome::Operator;
using genome::RungSpan;

namespace {

std::vector<GenomeRow> rung_rows(const Individual& ind, const RungSpan& span) {
  return {ind.rows.begin() + static_cast<std::ptrdiff_t>(span.begin),
          ind.rows.begin() + static_cast<std::ptrdiff_t>(span.end)};
}

Individual with_rows(const Individual& like, std::vector<GenomeRow> rows) {
  Individual out;
  out.rows = std::move(rows);
  out.id = like.id;
  out.generation_born = like.generation_born;
  return out;
}

// Removing row 0 promotes the next row to opener.
std::vector<GenomeRow> without_row(const std::vector<GenomeRow>& rung, std::size_t j) {
  std::vector<GenomeRow> out;
  out.reserve(rung.size() - 1);
  for (std::size_t i = 0; i < rung.size(); ++i) {
    if (i != j) out.push_back(rung[i]);
  }
  if (j == 0) {
    out.front().output = rung.front().output;
    out.front().op = Operator::Assign;
    out.front().mode = rung.front().mode;
  }
  return out;
}

constexpr TruthTable kB1 = input_table(InputSignal::B1);

}  // namespace

Individual resolve_priority(const Individual& individual) {
  const auto& rows = individual.rows;
  std::size_t first = 0;
  while (first < rows.size() && !rows[first].opens_rung()) ++first;
  const std::span<const GenomeRow> tail{rows.data() + first, rows.size() - first};
  const auto spans = genome::rung_spans(tail);

  std::vector<GenomeRow> out;
  for (std::size_t s = 0; s < spans.size(); ++s) {
    const bool shadowed = std::any_of(spans.begin() + static_cast<std::ptrdiff_t>(s) + 1, spans.end(), [&](const RungSpan& later) {
      return later.output == spans[s].output && later.mode == spans[s].mode;
    });
    if (shadowed) continue;
    for (std::size_t i = spans[s].begin; i < spans[s].end; ++i) {
      GenomeRow row = tail[i];
      if (i != spans[s].begin) {
        row.mode = spans[s].mode;
        if (row.op == Operator::Assign) row.op = Operator::And;
      }
      out.push_back(row);
    }
  }
  return with_rows(individual, std::move(out));
}

Individual simplify(const Individual& individual) {
  std::vector<GenomeRow> out;
  for (const auto& span : genome::rung_spans(individual.rows)) {
    auto rung = rung_rows(individual, span);
    const TruthTable target = genome::rung_table(rung);
    if (target == kTableFalse) continue;
    if (target == kTableTrue) {
      GenomeRow head = rung.front();
      head.negated = false;
      GenomeRow tail{std::nullopt, head.input, Operator::Or, true, head.mode};
      out.push_back(head);
      out.push_back(tail);
      continue;
    }
    bool changed = true;
    while (changed && rung.size() > 1) {
      changed = false;
      for (std::size_t j = rung.size(); j-- > 0;) {
        auto candidate = without_row(rung, j);
        if (genome::rung_table(candidate) == target) {
          rung = std::move(candidate);
          changed = true;
          break;
        }
      }
    }
    out.insert(out.end(), rung.begin(), rung.end());
  }
  return with_rows(individual, std::move(out));
}

Individual canonical_order(const Individual& individual) {
  auto spans = genome::rung_spans(individual.rows);
  std::stable_sort(spans.begin(), spans.end(), [](const RungSpan& a, const RungSpan& b) {
    if (a.mode != b.mode) return a.mode < b.mode;
    return a.output < b.output;
  });
  std::vector<GenomeRow> out;
  out.reserve(individual.rows.size());
  for (const auto& span : spans) {
    for (std::size_t i = span.begin; i < span.end; ++i) out.push_back(individual.rows[i]);
  }
  return with_rows(individual, std::move(out));
}

namespace {

int precedence(const Expr& e) {
  switch (e.kind()) {
    case Expr::Kind::Or:
      return 1;
    case Expr::Kind::And:
      return 2;
    default:
      return 3;
  }
}

void render(const Expr& e, int min_prec, std::string& out) {
  const int prec = precedence(e);
  const bool wrap = prec < min_prec;
  if (wrap) out += '(';
  switch (e.kind()) {
    case Expr::Kind::False:
      out += "FALSE";
      break;
    case Expr::Kind::True:
      out += "TRUE";
      break;
    case Expr::Kind::Lit:
      if (e.lit().negated) out += "NOT ";
      out += name(e.lit().input);
      break;
    case Expr::Kind::And:
    case Expr::Kind::Or:
      render(e.children()[0], prec, out);
      out += e.kind() == Expr::Kind::And ? " AND " : " OR ";
      render(e.children()[1], prec + 1, out);
      break;
  }
  if (wrap) out += ')';
}

void write_header(std::string& out, const Provenance& provenance, std::string_view open, std::string_view close) {
  out += fmt::format("{}generated by evoplc{}\n", open, close);
  for (const auto& [key, value] : provenance) out += fmt::format("{}{}: {}{}\n", open, key, value, close);
}

}  // namespace

std::string render_st_expr(const Expr& e) {
  std::string out;
  render(e, 0, out);
  return out;
}

StructuredTextProgram emit_structured_text(const Individual& individual, Provenance provenance) {
  StructuredTextProgram program;
  program.provenance = std::move(provenance);
  for (auto o : kAllOutputs) program.statements.push_back({o, std::nullopt, std::nullopt});
  for (auto& rung : genome::decode(canonical_order(resolve_priority(individual)))) {
    if (rung.implicit) continue;
    auto& stmt = program.statements[index(rung.target)];
    (rung.mode == Mode::Automatic ? stmt.automatic : stmt.manual) = std::move(rung.expr);
  }
  return program;
}

std::string StructuredTextProgram::text() const {
  std::string out;
  write_header(out, provenance, "(* ", " *)");
  for (const auto& stmt : statements) {
    const auto target = name(stmt.output);
    if (stmt.implicit()) {
      out += fmt::format("{} := FALSE; (* implicit: never assigned *)\n", target);
      continue;
    }
    if (stmt.automatic && !stmt.manual && (stmt.automatic->truth_table() & ~kB1) == 0) {
      out += fmt::format("{} := {};\n", target, render_st_expr(*stmt.automatic));
      continue;
    }
    const bool automatic_first = stmt.automatic.has_value();
    const auto& first = automatic_first ? stmt.automatic : stmt.manual;
    const auto& second = automatic_first ? stmt.manual : stmt.automatic;
    out += automatic_first ? "IF B1 THEN\n" : "IF NOT B1 THEN\n";
    out += fmt::format("    {} := {};\n", target, render_st_expr(*first));
    out += "ELSE\n";
    out += fmt::format("    {} := {};\n", target, second ? render_st_expr(*second) : std::string("FALSE"));
    out += "END_IF;\n";
  }
  return out;
}

std::string emit_instruction_list(const Individual& individual, const Provenance& provenance) {
  const Individual ordered = canonical_order(resolve_priority(individual));
  std::string out;
  write_header(out, provenance, "(* ", " *)");
  std::array<bool, kOutputCount> assigned{};
  for (const auto& span : genome::rung_spans(ordered.rows)) {
    const auto rows = rung_rows(ordered, span);
    assigned[index(span.output)] = true;
    if (span.mode == Mode::Manual) {
      out += fmt::format("(* manual mode: {} applies while B1 is off *)\n", name(span.output));
    } else if ((genome::rung_table(rows) & ~kB1) != 0) {
      out += fmt::format("(* automatic mode: {} applies while B1 is on *)\n", name(span.output));
    }
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const auto& row = rows[i];
      std::string_view op = "LD";
      if (i > 0) op = row.op == Operator::Or ? "OR" : "AND";
      out += fmt::format("{}{} {}\n", op, row.negated ? "N" : "", name(row.input));
    }
    out += fmt::format("ST {}\n", name(span.output));
  }
  for (auto o : kAllOutputs) {
    if (!assigned[index(o)]) out += fmt::format("(* {} is never assigned and stays FALSE *)\n", name(o));
  }
  return out;
}

namespace {

std::string literal_phrase(InputSignal s, bool positive) {
  switch (s) {
    case InputSignal::S1:
    case InputSignal::S2:
    case InputSignal::S3:
      return fmt::format("level is {} {}", positive ? "at or above" : "below", name(s));
    case InputSignal::B1:
      return positive ? "B1 is on" : "B1 is off";
    case InputSignal::B2:
    case InputSignal::B3:
      return fmt::format("{} is {}", name(s), positive ? "pressed" : "released");
  }
  return {};
}

std::string sentence_for(OutputSignal output, Mode mode, const std::vector<Cube>& cover) {
  const bool light = output == OutputSignal::L1;
  const std::string prefix = mode == Mode::Manual ? "In manual mode, " : "";
  if (cover.empty()) return fmt::format("{}{} is never active.", prefix, name(output));
  if (cover.size() == 1 && cover.front().care == 0) {
    return fmt::format("{}{} {}.", prefix, name(output), light ? "is always lit" : "always runs");
  }
  std::string body;
  for (std::size_t i = 0; i < cover.size(); ++i) {
    if (i > 0) body += "; or when ";
    bool first = true;
    for (auto s : kAllInputs) {
      const auto bit = static_cast<std::uint8_t>(1U << index(s));
      if (!(cover[i].care & bit)) continue;
      if (!first) body += " and ";
      body += literal_phrase(s, (cover[i].value & bit) != 0);
      first = false;
    }
  }
  return fmt::format("{}{} {} when {}.", prefix, name(output), light ? "is lit" : "runs", body);
}

}  // namespace

BehaviorSummary derive_behavior_summary(const Individual& individual) {
  BehaviorSummary summary;
  for (const auto& rung : genome::decode(canonical_order(resolve_priority(individual)))) {
    OutputBehavior b;
    b.output = rung.target;
    b.mode = rung.mode;
    b.implicit = rung.implicit;
    b.table = rung.expr.truth_table();
    b.cover = minimize_sop(b.table);
    b.expression = render_sop(b.cover);
    b.sentence = sentence_for(b.output, b.mode, b.cover);
    summary.entries.push_back(std::move(b));
  }
  std::stable_sort(summary.entries.begin(), summary.entries.end(), [](const auto& a, const auto& b) {
    if (a.mode != b.mode) return a.mode < b.mode;
    return a.output < b.output;
  });
  return summary;
}

const OutputBehavior* BehaviorSummary::find(OutputSignal output, Mode mode) const {
  for (const auto& e : entries) {
    if (e.output == output && e.mode == mode) return &e;
  }
  return nullptr;
}

std::string BehaviorSummary::text(const Provenance& provenance) const {
  std::string out;
  write_header(out, provenance, "# ", "");
  for (const auto& e : entries) {
    out += fmt::format("{}{} = {}\n", name(e.output), e.mode == Mode::Manual ? " (manual)" : "", e.expression);
    out += fmt::format("    {}\n", e.sentence);
  }
  return out;
}

}  // namespace evoplc::codegen

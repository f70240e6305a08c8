#include <doctest.h>

#include <set>

#include "evoplc/errors.hpp"
#include "evoplc/genome.hpp"
#include "evoplc/genome_json.hpp"
#include "oracles.hpp"

using namespace evoplc;
using namespace evoplc::genome;

namespace {

GenomeRow opener(OutputSignal o, InputSignal in, bool neg = false, Mode m = Mode::Automatic) {
  return {o, in, Operator::Assign, neg, m};
}

GenomeRow cont(InputSignal in, Operator op = Operator::And, bool neg = false, Mode m = Mode::Automatic) {
  return {std::nullopt, in, op, neg, m};
}

bool has(const std::vector<Violation>& v, ViolationKind k) {
  for (const auto& x : v) {
    if (x.kind == k) return true;
  }
  return false;
}

}  // namespace

TEST_CASE("reference controller is the seven-row automatic table") {
  const auto ref = reference_controller();
  REQUIRE(ref.rows.size() == 7);
  CHECK(validate(ref).empty());
  const auto t = [&](OutputSignal o) { return oracle::output_table(ref.rows, o); };
  const auto b1 = input_table(InputSignal::B1);
  CHECK(t(OutputSignal::P1) == (~input_table(InputSignal::S3) & b1));
  CHECK(t(OutputSignal::P2) == (input_table(InputSignal::S2) & b1));
  CHECK(t(OutputSignal::P3) == (input_table(InputSignal::S1) & b1));
  CHECK(t(OutputSignal::L1) == b1);
}

TEST_CASE("validate reports each violation kind") {
  CHECK(has(validate(Individual{}), ViolationKind::Empty));

  Individual dangling{{cont(InputSignal::S1), opener(OutputSignal::P1, InputSignal::S2)}};
  CHECK(has(validate(dangling), ViolationKind::FirstRowOpensNothing));

  Individual bad_opener{{{OutputSignal::P1, InputSignal::S1, Operator::And, false, Mode::Automatic}}};
  CHECK(has(validate(bad_opener), ViolationKind::OpenerNotAssign));

  Individual bad_cont{{opener(OutputSignal::P1, InputSignal::S1), cont(InputSignal::S2, Operator::Assign)}};
  CHECK(has(validate(bad_cont), ViolationKind::ContinuationNotConnective));

  Individual with_or{{opener(OutputSignal::P1, InputSignal::S1), cont(InputSignal::S2, Operator::Or)}};
  CHECK(validate(with_or, {1, 16, OperatorSet::Full}).empty());
  CHECK(has(validate(with_or, {1, 16, OperatorSet::Paper}), ViolationKind::OperatorNotAllowed));

  Individual mixed{{opener(OutputSignal::P1, InputSignal::S1), cont(InputSignal::S2, Operator::And, false, Mode::Manual)}};
  CHECK(has(validate(mixed), ViolationKind::ModeMismatch));

  Individual dup{{opener(OutputSignal::P1, InputSignal::S1), opener(OutputSignal::P1, InputSignal::S2)}};
  CHECK(has(validate(dup), ViolationKind::DuplicateRung));
  Individual both_modes{{opener(OutputSignal::P1, InputSignal::S1), opener(OutputSignal::P1, InputSignal::S2, false, Mode::Manual)}};
  CHECK(validate(both_modes).empty());

  Individual longer{std::vector<GenomeRow>(5, cont(InputSignal::S1))};
  longer.rows[0] = opener(OutputSignal::P1, InputSignal::S1);
  CHECK(has(validate(longer, {1, 4, OperatorSet::Full}), ViolationKind::TooManyRows));
}

TEST_CASE("random individuals are valid and within bounds") {
  for (const auto& bounds : {GenomeBounds{}, GenomeBounds{1, 1, OperatorSet::Paper}, GenomeBounds{1, 3, OperatorSet::Full},
                             GenomeBounds{8, 8, OperatorSet::Paper}}) {
    for (std::uint64_t seed = 0; seed < 10000; ++seed) {
      Rng rng = derive_rng(seed, 11);
      const auto ind = random_individual(rng, bounds);
      REQUIRE(validate(ind, bounds).empty());
      REQUIRE(ind.rows.size() >= bounds.r_min);
      REQUIRE(ind.rows.size() <= bounds.r_max);
    }
  }
}

TEST_CASE("random individuals never exceed eight rungs") {
  for (std::uint64_t seed = 0; seed < 2000; ++seed) {
    Rng rng = derive_rng(seed, 3);
    const auto ind = random_individual(rng, {30, 30, OperatorSet::Full});
    REQUIRE(rung_spans(ind.rows).size() <= 8);
  }
}

TEST_CASE("rung spans split the table at opener rows") {
  const auto ref = reference_controller();
  const auto spans = rung_spans(ref.rows);
  REQUIRE(spans.size() == 4);
  CHECK(spans[0].begin == 0);
  CHECK(spans[0].end == 2);
  CHECK(spans[3].begin == 6);
  CHECK(spans[3].size() == 1);
  CHECK(spans[2].output == OutputSignal::P3);

  const std::vector<GenomeRow> dangling = {cont(InputSignal::S1)};
  CHECK_THROWS_AS(rung_spans(dangling), DecodeError);
}

TEST_CASE("decode folds left to right and adds implicit rungs") {
  Individual ind{{opener(OutputSignal::P2, InputSignal::S1), cont(InputSignal::S2, Operator::Or, true),
                  cont(InputSignal::B1, Operator::And)}};
  const auto rungs = decode(ind);
  REQUIRE(rungs.size() == 4);
  CHECK(rungs[0].target == OutputSignal::P2);
  CHECK_FALSE(rungs[0].implicit);
  const auto s1 = input_table(InputSignal::S1);
  const auto s2 = input_table(InputSignal::S2);
  const auto b1 = input_table(InputSignal::B1);
  CHECK(rungs[0].expr.truth_table() == ((s1 | ~s2) & b1));
  CHECK(rung_table(ind.rows) == ((s1 | ~s2) & b1));
  std::set<OutputSignal> implicit;
  for (std::size_t i = 1; i < rungs.size(); ++i) {
    CHECK(rungs[i].implicit);
    CHECK(rungs[i].expr.truth_table() == kTableFalse);
    implicit.insert(rungs[i].target);
  }
  CHECK(implicit == std::set<OutputSignal>{OutputSignal::P1, OutputSignal::P3, OutputSignal::L1});
}

TEST_CASE("encode inverts decode") {
  for (std::uint64_t seed = 0; seed < 3000; ++seed) {
    Rng rng = derive_rng(seed, 5);
    const auto ind = random_individual(rng, {});
    REQUIRE(encode(decode(ind)) == ind.rows);
  }
  std::vector<RungExpression> right_deep = {
      {OutputSignal::P1, Mode::Automatic,
       Expr::conjunction(Expr::literal({InputSignal::S1, false}),
                         Expr::disjunction(Expr::literal({InputSignal::S2, false}), Expr::literal({InputSignal::S3, false}))),
       false}};
  CHECK_THROWS_AS(encode(right_deep), DecodeError);
}

TEST_CASE("effective row count ignores overwritten and redundant rows") {
  CHECK(effective_row_count(reference_controller()) == 7);
  Individual overwritten{{opener(OutputSignal::P1, InputSignal::S1), opener(OutputSignal::P2, InputSignal::S2),
                          cont(InputSignal::S2)}};
  // Duplicate literal is redundant.
  CHECK(effective_row_count(overwritten) == 2);
}

TEST_CASE("genome JSON round trips byte for byte") {
  const auto ref = reference_controller();
  const auto text = to_json_text(ref);
  CHECK(text.rfind("[\n  {\"line\":0,\"output\":\"P1\",\"input\":\"S3\",\"op\":\"ASSIGN\",\"neg\":true,\"mode\":\"A\"},", 0) == 0);
  CHECK(to_json_text(from_json_text(text)) == text);
  CHECK(same_rows(from_json_text(text), ref));
  for (std::uint64_t seed = 0; seed < 500; ++seed) {
    Rng rng = derive_rng(seed, 9);
    const auto ind = random_individual(rng, {});
    const auto t = to_json_text(ind);
    REQUIRE(same_rows(from_json_text(t), ind));
    REQUIRE(to_json_text(from_json_text(t)) == t);
  }
}

TEST_CASE("genome JSON rejects malformed tables") {
  CHECK_THROWS_AS(from_json_text("not json"), ParseError);
  CHECK_THROWS_AS(from_json_text("[{\"line\":1,\"output\":\"P1\",\"input\":\"S3\",\"op\":\"ASSIGN\",\"neg\":true,\"mode\":\"A\"}]"),
                  ParseError);
  CHECK_THROWS_AS(from_json_text("[{\"line\":0,\"output\":\"P9\",\"input\":\"S3\",\"op\":\"ASSIGN\",\"neg\":true,\"mode\":\"A\"}]"),
                  ParseError);
  CHECK_THROWS_AS(from_json_text("[{\"line\":0,\"output\":\"P1\",\"input\":\"S3\",\"op\":\"XOR\",\"neg\":true,\"mode\":\"A\"}]"),
                  ParseError);
}

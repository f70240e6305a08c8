#include <doctest.h>

#include <random>

#include "evoplc/errors.hpp"
#include "evoplc/evaluate.hpp"
#include "oracles.hpp"

using namespace evoplc;
using namespace evoplc::evaluate;

namespace {

// Mixes a coarse grid (many ties) with continuous values.
ObjectiveVector random_objectives(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  if (rng() % 2 == 0) {
    std::uniform_int_distribution<int> g(0, 4);
    return {static_cast<double>(g(rng)), static_cast<double>(g(rng)), static_cast<double>(g(rng))};
  }
  return {12.0 * u(rng), 400.0 * u(rng), 16.0 * u(rng)};
}

}  // namespace

TEST_CASE("fitness is exactly 3 at the targets") {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> a(1e-3, 50.0);
  for (int i = 0; i < 1000; ++i) {
    FitnessParams p;
    p.alpha = {a(rng), a(rng), a(rng)};
    p.p_trans = a(rng);
    p.p_code = 1.0 + static_cast<double>(rng() % 16);
    REQUIRE(fitness({p.p_trans, 0.0, p.p_code}, p) == 3.0);
  }
}

TEST_CASE("fitness hand substitution") {
  FitnessParams p;
  p.alpha = {1.0, 1.0, 1.0};
  p.p_trans = 2.0;
  p.p_code = 9.0;
  CHECK(fitness({1.0, 1.0, 8.0}, p) == doctest::Approx(1.5).epsilon(1e-12));
  // Overshooting the transport target is clamped.
  CHECK(fitness({5.0, 1.0, 8.0}, p) == fitness({2.0, 1.0, 8.0}, p));
}

TEST_CASE("clamped fitness stays in (0, 3]") {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> a(1e-3, 10.0);
  FitnessParams p;
  for (int i = 0; i < 100000; ++i) {
    if (i % 1000 == 0) p.alpha = {a(rng), a(rng), a(rng)};
    const auto v = random_objectives(rng);
    const double f = fitness(v, p);
    REQUIRE(f > 0.0);
    REQUIRE(f <= 3.0);
  }
}

TEST_CASE("unclamped fitness rejects non-positive denominators") {
  FitnessParams p;
  p.alpha = {1.0, 1.0, 1.0};
  p.p_trans = 1.0;
  p.p_code = 4.0;
  p.clamp_negative = false;
  CHECK_THROWS_AS(fitness({2.0, 0.0, 4.0}, p), NumericalError);
  CHECK(fitness({1.5, 0.0, 4.0}, p) == doctest::Approx(1.0 / 0.5 + 2.0));
}

TEST_CASE("fitness parameter validation") {
  CHECK(FitnessParams{}.problems(16).empty());
  FitnessParams p;
  p.alpha[1] = 0.0;
  CHECK_FALSE(p.problems(16).empty());
  p = {};
  p.p_code = 17.0;
  CHECK_FALSE(p.problems(16).empty());
  p = {};
  p.p_trans = -1.0;
  CHECK_FALSE(p.problems(16).empty());
}

TEST_CASE("default transport target is 0.8 of the pumps' nonstop volume") {
  const auto sc = plant::Scenario::automatic();
  CHECK(default_p_trans(sc) == doctest::Approx(0.8 * 0.1 * 120.0));
  CHECK(default_p_trans(sc, Transport::Inflow) == doctest::Approx(0.8 * 0.08 * 120.0));
  CHECK(FitnessParams{}.p_trans == doctest::Approx(default_p_trans(sc)));
}

TEST_CASE("dominance is a strict partial order") {
  std::mt19937_64 rng(3);
  for (int i = 0; i < 100000; ++i) {
    const auto a = random_objectives(rng);
    const auto b = random_objectives(rng);
    const auto c = random_objectives(rng);
    REQUIRE_FALSE(dominates(a, a));
    REQUIRE_FALSE((dominates(a, b) && dominates(b, a)));
    if (dominates(a, b) && dominates(b, c)) REQUIRE(dominates(a, c));
    REQUIRE(dominates(a, b) == oracle::pairwise_dominates(a, b));
  }
}

TEST_CASE("front matches the pairwise oracle and is idempotent") {
  std::mt19937_64 rng(4);
  for (int round = 0; round < 100; ++round) {
    std::vector<ObjectiveVector> pts(1000);
    for (auto& p : pts) p = random_objectives(rng);
    const auto got = pareto_front_indices(pts);
    REQUIRE(got == oracle::front(pts));
    const auto front = pareto_front(std::span<const ObjectiveVector>(pts));
    REQUIRE(pareto_front(std::span<const ObjectiveVector>(front)) == front);
    for (std::size_t i = 0; i < front.size(); ++i) {
      for (std::size_t j = 0; j < front.size(); ++j) REQUIRE_FALSE(dominates(front[i], front[j]));
    }
  }
  CHECK(pareto_front_indices(std::vector<ObjectiveVector>{}).empty());
}

TEST_CASE("objectives of the reference controller") {
  const Evaluator ev({});
  const auto ref = genome::reference_controller();
  const auto e = ev(ref);
  const auto sim = oracle::simulate(ref.rows, plant::Scenario::automatic());
  // Frozen from the reference simulation: the level settles in the S2 band.
  CHECK(sim.out_volume == doctest::Approx(9.2).epsilon(1e-9));
  CHECK(sim.pump_seconds[0] + sim.pump_seconds[1] + sim.pump_seconds[2] == doctest::Approx(304.0).epsilon(1e-9));
  CHECK(e.objectives.f1 == doctest::Approx(sim.out_volume).epsilon(1e-12));
  CHECK(e.objectives.f2 == doctest::Approx(304.0).epsilon(1e-9));
  CHECK(e.objectives.f3 == 16.0 - 7.0);
  CHECK(e.feasible);
  CHECK(e.fitness == doctest::Approx(fitness(e.objectives, FitnessParams{})));
}

TEST_CASE("transport is outflow, or inflow when configured") {
  EvaluationSetup s;
  s.objectives.transport = Transport::Inflow;
  const auto e = Evaluator(s)(genome::reference_controller());
  CHECK(e.objectives.f1 == doctest::Approx(0.08 * 120.0));
  s.objectives.transport = Transport::Outflow;
  s.objectives.energy_weights = {2.0, 0.0, 0.0};
  const auto w = Evaluator(s)(genome::reference_controller());
  CHECK(w.objectives.f2 == doctest::Approx(240.0));
}

TEST_CASE("feasibility follows the constraint toggles") {
  const genome::Individual fill{{{OutputSignal::P1, InputSignal::B1, genome::Operator::Assign, false, genome::Mode::Automatic}}};
  EvaluationSetup s;
  s.bounds = {1, 16, genome::OperatorSet::Full};
  CHECK_FALSE(Evaluator(s)(fill).feasible);
  s.constraints.forbid_overflow = false;
  CHECK(Evaluator(s)(fill).feasible);

  const genome::Individual drain{{{OutputSignal::P2, InputSignal::B1, genome::Operator::Assign, false, genome::Mode::Automatic}}};
  s = {};
  s.bounds = {1, 16, genome::OperatorSet::Full};
  CHECK_FALSE(Evaluator(s)(drain).feasible);
  s.constraints.forbid_underflow = false;
  CHECK(Evaluator(s)(drain).feasible);

  // Row bounds are part of feasibility.
  s = {};
  s.bounds = {8, 16, genome::OperatorSet::Full};
  CHECK_FALSE(Evaluator(s)(genome::reference_controller()).feasible);
  s.constraints.enforce_bounds = false;
  CHECK(Evaluator(s)(genome::reference_controller()).feasible);
}

TEST_CASE("f3 credits rows removed by simplification") {
  EvaluationSetup s;
  s.bounds = {1, 16, genome::OperatorSet::Full};
  const Evaluator ev(s);
  using genome::Mode;
  using genome::Operator;
  const genome::Individual redundant{{{OutputSignal::P1, InputSignal::S1, Operator::Assign, false, Mode::Automatic},
                                      {std::nullopt, InputSignal::S1, Operator::And, false, Mode::Automatic}}};
  CHECK(ev(redundant).objectives.f3 == 15.0);
  const genome::Individual never{{{OutputSignal::P1, InputSignal::S1, Operator::Assign, false, Mode::Automatic},
                                  {std::nullopt, InputSignal::S1, Operator::And, true, Mode::Automatic}}};
  CHECK(ev(never).objectives.f3 == 16.0);
}

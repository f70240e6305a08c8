#include "evoplc/evaluate.hpp"

#include <algorithm>

#include <fmt/format.h>

#include "evoplc/errors.hpp"

namespace evoplc::evaluate {

ObjectiveVector objectives(const plant::ScanTrace& trace, const genome::Individual& individual,
                           const ObjectiveSettings& settings) {
  ObjectiveVector v;
  const auto& s = trace.summary;
  v.f1 = settings.transport == Transport::Outflow ? s.total_out_volume : s.total_in_volume;
  for (std::size_t p = 0; p < 3; ++p) v.f2 += settings.energy_weights[p] * s.pump_on_seconds[p];
  const auto effective = genome::effective_row_count(individual);
  v.f3 = static_cast<double>(settings.r_max) - static_cast<double>(std::min(effective, settings.r_max));
  return v;
}

std::vector<std::string> FitnessParams::problems(std::size_t r_max) const {
  std::vector<std::string> out;
  if (!std::all_of(alpha.begin(), alpha.end(), [](double a) { return a > 0; })) {
    out.emplace_back("alpha weights must be positive");
  }
  if (!(p_trans > 0)) out.emplace_back("p_trans must be positive");
  if (!(p_code > 0 && p_code <= static_cast<double>(r_max))) out.emplace_back("p_code must lie in (0, r_max]");
  return out;
}

double default_p_trans(const plant::Scenario& scenario, Transport transport) {
  const auto& p = scenario.params;
  const double rate = transport == Transport::Outflow ? p.q2 + p.q3 : p.q1;
  return 0.8 * rate * scenario.duration;
}

double fitness(const ObjectiveVector& obj, const FitnessParams& params) {
  const std::array<double, 3> deficits = {params.p_trans - obj.f1, obj.f2 - params.p_energy_target,
                                          params.p_code - obj.f3};
  double total = 0.0;
  for (std::size_t i = 0; i < 3; ++i) {
    const double d = params.clamp_negative ? std::max(0.0, deficits[i]) : deficits[i];
    const double denom = 1.0 + params.alpha[i] * d;
    if (!(denom > 0.0)) {
      throw NumericalError(fmt::format("fitness term {} has non-positive denominator {}", i + 1, denom));
    }
    total += 1.0 / denom;
  }
  return total;
}

bool feasible(const plant::ScanTrace& trace, const genome::Individual& individual, const ConstraintSet& constraints,
              const genome::GenomeBounds& bounds) {
  if (constraints.forbid_overflow && trace.summary.overflow_events >= 1) return false;
  if (constraints.forbid_underflow && trace.summary.underflow_events >= 1) return false;
  if (constraints.enforce_bounds) {
    const auto n = individual.rows.size();
    if (n < bounds.r_min || n > bounds.r_max) return false;
  }
  return true;
}

bool dominates(const ObjectiveVector& a, const ObjectiveVector& b) {
  if (a.f1 < b.f1 || a.f2 > b.f2 || a.f3 < b.f3) return false;
  return a.f1 > b.f1 || a.f2 < b.f2 || a.f3 > b.f3;
}

std::vector<std::size_t> pareto_front_indices(std::span<const ObjectiveVector> points) {
  // Sweep in decreasing f1 so that only earlier points can dominate later
  // ones; the survivors are then reported in input order.
  std::vector<std::size_t> order(points.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const auto& pa = points[a];
    const auto& pb = points[b];
    if (pa.f1 != pb.f1) return pa.f1 > pb.f1;
    if (pa.f2 != pb.f2) return pa.f2 < pb.f2;
    return pa.f3 > pb.f3;
  });
  std::vector<std::size_t> kept;
  std::vector<char> on_front(points.size(), 0);
  for (auto i : order) {
    const bool dominated = std::any_of(kept.begin(), kept.end(), [&](std::size_t k) { return dominates(points[k], points[i]); });
    if (!dominated) {
      kept.push_back(i);
      on_front[i] = 1;
    }
  }
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (on_front[i]) out.push_back(i);
  }
  return out;
}

Evaluator::Evaluator(EvaluationSetup setup) : setup_(std::move(setup)) {
  setup_.objectives.r_max = setup_.bounds.r_max;
}

plant::ScanTrace Evaluator::trace(const genome::Individual& individual) const {
  return plant::run_episode(genome::decode(individual), setup_.scenario);
}

Evaluation Evaluator::operator()(const genome::Individual& individual) const {
  const auto program = plant::compile(genome::decode(individual));
  const auto trace = plant::run_episode(program, setup_.scenario, false);
  Evaluation e;
  e.objectives = objectives(trace, individual, setup_.objectives);
  e.feasible = feasible(trace, individual, setup_.constraints, setup_.bounds);
  e.fitness = fitness(e.objectives, setup_.fitness);
  return e;
}

}  // namespace evoplc::evaluate

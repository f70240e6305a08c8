#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "evoplc/genome.hpp"
#include "evoplc/plant.hpp"

namespace evoplc::evaluate {

// f1 transport (maximize), f2 energy (minimize), f3 code compactness
// (maximize).
struct ObjectiveVector {
  double f1 = 0.0;
  double f2 = 0.0;
  double f3 = 0.0;

  friend bool operator==(const ObjectiveVector&, const ObjectiveVector&) = default;
  friend auto operator<=>(const ObjectiveVector&, const ObjectiveVector&) = default;
};

enum class Transport : std::uint8_t { Outflow, Inflow };

struct ObjectiveSettings {
  Transport transport = Transport::Outflow;
  std::array<double, 3> energy_weights = {1.0, 1.0, 1.0};  // P1, P2, P3
  std::size_t r_max = 16;
};

// f3 = r_max - effective rows. Rows eliminated by simplification are thereby
// credited back on top of r_max - raw rows.
ObjectiveVector objectives(const plant::ScanTrace& trace, const genome::Individual& individual,
                           const ObjectiveSettings& settings = {});

struct FitnessParams {
  std::array<double, 3> alpha = {2.0, 0.05, 0.5};
  double p_trans = 9.6;  // default_p_trans() of the default scenario
  double p_code = 12.0;
  double p_energy_target = 0.0;
  bool clamp_negative = true;

  std::vector<std::string> problems(std::size_t r_max) const;
};

// 0.8 of the volume the pumps could move in one episode running nonstop.
double default_p_trans(const plant::Scenario& scenario, Transport transport = Transport::Outflow);

// Sum of three reciprocal terms:
//   1/(1 + a1 (P_trans - f1)) + 1/(1 + a2 (f2 - P_energy)) + 1/(1 + a3 (P_code - f3))
// With clamp_negative every deficit is floored at 0, so each term is in (0, 1].
// Without it a non-positive denominator raises NumericalError.
double fitness(const ObjectiveVector& obj, const FitnessParams& params);

// Constraint realization: g_j > 0 as "fewer than one event".
struct ConstraintSet {
  bool forbid_overflow = true;
  bool forbid_underflow = true;
  bool enforce_bounds = true;
};

bool feasible(const plant::ScanTrace& trace, const genome::Individual& individual, const ConstraintSet& constraints,
              const genome::GenomeBounds& bounds = {});

// Strict Pareto dominance under (f1 max, f2 min, f3 max).
bool dominates(const ObjectiveVector& a, const ObjectiveVector& b);

// Indices of items no other item dominates, in input order.
std::vector<std::size_t> pareto_front_indices(std::span<const ObjectiveVector> points);

template <class T, class Proj>
std::vector<T> pareto_front(std::span<const T> items, Proj proj) {
  std::vector<ObjectiveVector> pts;
  pts.reserve(items.size());
  for (const auto& it : items) pts.push_back(std::invoke(proj, it));
  std::vector<T> out;
  for (auto i : pareto_front_indices(pts)) out.push_back(items[i]);
  return out;
}

inline std::vector<ObjectiveVector> pareto_front(std::span<const ObjectiveVector> points) {
  return pareto_front(points, [](const ObjectiveVector& v) { return v; });
}

struct Evaluation {
  ObjectiveVector objectives;
  bool feasible = false;
  double fitness = 0.0;
};

struct EvaluationSetup {
  plant::Scenario scenario = plant::Scenario::automatic();
  genome::GenomeBounds bounds;
  ObjectiveSettings objectives;
  FitnessParams fitness;
  ConstraintSet constraints;
};

// Digital-twin evaluation of one individual. Pure, so safe to call from
// several threads.
class Evaluator {
 public:
  explicit Evaluator(EvaluationSetup setup);

  Evaluation operator()(const genome::Individual& individual) const;
  plant::ScanTrace trace(const genome::Individual& individual) const;
  const EvaluationSetup& setup() const { return setup_; }

 private:
  EvaluationSetup setup_;
};

}  // namespace evoplc::evaluate

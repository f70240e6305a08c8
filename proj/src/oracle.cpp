#include "evoplc/oracle.hpp"

#include <array>
#include <thread>

#include <fmt/format.h>

#include "evoplc/errors.hpp"

namespace evoplc::cli {

namespace {

using genome::GenomeRow;
using genome::Individual;
using genome::Mode;
using genome::Operator;

constexpr std::size_t kKeys = kOutputCount * 2;
constexpr std::uint64_t kLiterals = kInputCount * 2;

std::vector<Operator> continuation_ops(const genome::GenomeBounds& bounds) {
  if (bounds.operators == genome::OperatorSet::Paper) return {Operator::And};
  return {Operator::And, Operator::Or};
}

struct Enumerator {
  const genome::GenomeBounds& bounds;
  std::vector<Operator> ops;
  std::vector<Individual> out;
  std::vector<GenomeRow> rows;

  void extend(std::uint32_t used, Mode mode) {
    if (rows.size() >= bounds.r_min) out.push_back(Individual{rows, out.size(), 0});
    if (rows.size() == bounds.r_max) return;
    for (auto o : kAllOutputs) {
      for (auto m : {Mode::Automatic, Mode::Manual}) {
        const auto key = index(o) * 2 + static_cast<std::size_t>(m);
        if (used & (1U << key)) continue;
        for_each_literal([&](InputSignal in, bool neg) {
          rows.push_back({o, in, Operator::Assign, neg, m});
          extend(used | (1U << key), m);
          rows.pop_back();
        });
      }
    }
    if (rows.empty()) return;
    for (auto op : ops) {
      for_each_literal([&](InputSignal in, bool neg) {
        rows.push_back({std::nullopt, in, op, neg, mode});
        extend(used, mode);
        rows.pop_back();
      });
    }
  }

  template <class F>
  static void for_each_literal(F&& f) {
    for (auto in : kAllInputs) {
      for (bool neg : {false, true}) f(in, neg);
    }
  }
};

}  // namespace

std::uint64_t space_size(const genome::GenomeBounds& bounds) {
  const std::uint64_t ops = continuation_ops(bounds).size();
  // ways[u]: valid prefixes of the current length that use u rung keys.
  std::array<std::uint64_t, kKeys + 1> ways{};
  ways[0] = 1;
  std::uint64_t total = 0;
  for (std::size_t len = 1; len <= bounds.r_max; ++len) {
    std::array<std::uint64_t, kKeys + 1> next{};
    for (std::size_t u = 0; u <= kKeys; ++u) {
      if (ways[u] == 0) continue;
      if (u < kKeys) next[u + 1] += ways[u] * (kKeys - u) * kLiterals;
      if (u > 0) next[u] += ways[u] * kLiterals * ops;
    }
    ways = next;
    if (len >= bounds.r_min) {
      for (auto w : ways) total += w;
    }
    if (total > kOracleSpaceLimit) return total;
  }
  return total;
}

std::vector<Individual> enumerate_space(const genome::GenomeBounds& bounds) {
  const auto size = space_size(bounds);
  if (size > kOracleSpaceLimit) {
    throw SpaceTooLarge(fmt::format("genome space has more than {} individuals", kOracleSpaceLimit));
  }
  Enumerator e{bounds, continuation_ops(bounds), {}, {}};
  e.out.reserve(size);
  e.extend(0, Mode::Automatic);
  return std::move(e.out);
}

OracleResult enumerate_oracle(const evaluate::Evaluator& evaluator, std::size_t jobs) {
  OracleResult r;
  r.individuals = enumerate_space(evaluator.setup().bounds);
  r.evaluations.resize(r.individuals.size());
  const std::size_t workers = std::max<std::size_t>(1, std::min(jobs, r.individuals.size()));
  {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        for (std::size_t i = w; i < r.individuals.size(); i += workers) r.evaluations[i] = evaluator(r.individuals[i]);
      });
    }
  }
  std::vector<std::size_t> feasible;
  std::vector<evaluate::ObjectiveVector> pts;
  for (std::size_t i = 0; i < r.evaluations.size(); ++i) {
    if (!r.evaluations[i].feasible) continue;
    feasible.push_back(i);
    pts.push_back(r.evaluations[i].objectives);
  }
  for (auto k : evaluate::pareto_front_indices(pts)) r.front.push_back(feasible[k]);
  return r;
}

}  // namespace evoplc::cli

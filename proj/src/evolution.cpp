#include "evoplc/evolution.hpp"

#include <algorithm>
#include <array>
#include <limits>
#include <map>
#include <numeric>
#include <set>
#include <thread>
#include <unordered_map>

#include <fmt/format.h>
#include <fmt/ranges.h>
#include <spdlog/spdlog.h>

#include "evoplc/errors.hpp"

namespace evoplc::evolution {

using evaluate::ObjectiveVector;
using genome::GenomeBounds;
using genome::GenomeRow;
using genome::Individual;
using genome::Mode;
using genome::Operator;
using genome::OperatorSet;

std::vector<std::string> EvolutionConfig::problems() const {
  std::vector<std::string> out;
  if (population_size == 0) out.emplace_back("population_size must be positive");
  if (parents < 2) out.emplace_back("parents must be at least 2");
  if (parents > population_size) out.emplace_back("parents must not exceed population_size");
  if (!(mutation_rate >= 0.0 && mutation_rate <= 1.0)) out.emplace_back("mutation_rate must lie in [0, 1]");
  if (elitism > population_size) out.emplace_back("elitism must not exceed population_size");
  if (bounds.r_max == 0) out.emplace_back("r_max must be at least 1");
  if (bounds.r_min == 0 || bounds.r_min > bounds.r_max) out.emplace_back("r_min must lie in [1, r_max]");
  return out;
}

namespace {

double key_value(const EvaluatedIndividual& m, SelectionKey key) {
  switch (key) {
    case SelectionKey::Fitness:
      return m.fitness.value_or(0.0);
    case SelectionKey::Transport:
      return m.objectives.f1;
    case SelectionKey::Energy:
      return m.objectives.f2;
    case SelectionKey::Code:
      return m.objectives.f3;
  }
  return 0.0;
}

bool older(const Individual& a, const Individual& b) {
  if (a.generation_born != b.generation_born) return a.generation_born < b.generation_born;
  return a.id < b.id;
}

}  // namespace

std::vector<EvaluatedIndividual> select(const Population& population, std::size_t count, Direction direction,
                                        SelectionKey key) {
  if (population.members.empty()) throw EmptyPopulation("cannot select from an empty population");
  std::vector<const EvaluatedIndividual*> pool;
  for (const auto& m : population.members) {
    if (m.feasible) pool.push_back(&m);
  }
  std::stable_sort(pool.begin(), pool.end(), [&](const EvaluatedIndividual* a, const EvaluatedIndividual* b) {
    const double va = key_value(*a, key);
    const double vb = key_value(*b, key);
    if (va != vb) return direction == Direction::Maximize ? va > vb : va < vb;
    return older(a->individual, b->individual);
  });
  std::vector<EvaluatedIndividual> out;
  for (std::size_t i = 0; i < std::min(count, pool.size()); ++i) out.push_back(*pool[i]);
  return out;
}

namespace {

using RungKey = std::pair<OutputSignal, Mode>;

std::vector<GenomeRow> rows_of(const Individual& ind, const genome::RungSpan& span) {
  return {ind.rows.begin() + static_cast<std::ptrdiff_t>(span.begin),
          ind.rows.begin() + static_cast<std::ptrdiff_t>(span.end)};
}

}  // namespace

Individual recombine(std::span<const Individual> parents, Rng& rng, const GenomeBounds& bounds) {
  if (parents.empty()) return {};

  struct Slot {
    RungKey key;
    std::vector<std::vector<GenomeRow>> variants;  // one per parent holding the key
    std::size_t chosen = 0;
  };
  std::vector<Slot> slots;
  for (const auto& parent : parents) {
    for (const auto& span : genome::rung_spans(parent.rows)) {
      const RungKey key{span.output, span.mode};
      auto it = std::find_if(slots.begin(), slots.end(), [&](const Slot& s) { return s.key == key; });
      if (it == slots.end()) {
        slots.push_back({key, {}, 0});
        it = std::prev(slots.end());
      }
      it->variants.push_back(rows_of(parent, span));
    }
  }
  for (auto& s : slots) s.chosen = uniform_index(rng, s.variants.size());

  auto total_rows = [&] {
    std::size_t n = 0;
    for (const auto& s : slots) n += s.variants[s.chosen].size();
    return n;
  };
  // Too short: swap in the longest variants until the lower bound is met.
  for (auto& s : slots) {
    if (total_rows() >= bounds.r_min) break;
    for (std::size_t v = 0; v < s.variants.size(); ++v) {
      if (s.variants[v].size() > s.variants[s.chosen].size()) s.chosen = v;
    }
  }
  // Too long: drop whole rungs from the end.
  while (!slots.empty() && total_rows() > bounds.r_max) slots.pop_back();

  const std::size_t n = total_rows();
  if (slots.empty() || n < bounds.r_min) {
    Individual fallback;
    fallback.rows = parents[uniform_index(rng, parents.size())].rows;
    return fallback;
  }
  Individual child;
  child.rows.reserve(n);
  for (const auto& s : slots) {
    const auto& rows = s.variants[s.chosen];
    child.rows.insert(child.rows.end(), rows.begin(), rows.end());
  }
  return child;
}

namespace {

class Mutator {
 public:
  Mutator(std::vector<GenomeRow> rows, const GenomeBounds& bounds, Rng& rng)
      : rows_(std::move(rows)), bounds_(bounds), rng_(rng) {}

  std::vector<GenomeRow> take() { return std::move(rows_); }

  void mutate_fields(double rate) {
    for (std::size_t i = 0; i < rows_.size(); ++i) {
      if (coin(rng_, rate)) mutate_output_slot(i);
      if (coin(rng_, rate)) mutate_input(i);
      if (coin(rng_, rate)) mutate_operator(i);
      if (coin(rng_, rate)) rows_[i].negated = !rows_[i].negated;
      if (coin(rng_, rate)) mutate_mode(i);
    }
  }

  void structural_edit() {
    enum class Edit { Insert, Delete, Swap };
    std::vector<Edit> edits;
    if (rows_.size() < bounds_.r_max) edits.push_back(Edit::Insert);
    if (rows_.size() > bounds_.r_min) edits.push_back(Edit::Delete);
    if (genome::rung_spans(rows_).size() >= 2) edits.push_back(Edit::Swap);
    if (edits.empty()) return;
    switch (edits[uniform_index(rng_, edits.size())]) {
      case Edit::Insert:
        insert_row();
        break;
      case Edit::Delete:
        delete_row(uniform_index(rng_, rows_.size()));
        break;
      case Edit::Swap:
        swap_rungs();
        break;
    }
  }

 private:
  std::set<RungKey> used_keys(std::optional<std::size_t> except = std::nullopt) const {
    std::set<RungKey> keys;
    for (std::size_t i = 0; i < rows_.size(); ++i) {
      if (rows_[i].opens_rung() && i != except) keys.insert({*rows_[i].output, rows_[i].mode});
    }
    return keys;
  }

  // Index of the row that opens the rung containing row i.
  std::size_t opener_of(std::size_t i) const {
    while (i > 0 && !rows_[i].opens_rung()) --i;
    return i;
  }

  void set_mode_from(std::size_t first, Mode mode) {
    for (std::size_t j = first; j < rows_.size() && (j == first || !rows_[j].opens_rung()); ++j) rows_[j].mode = mode;
  }

  Operator random_connective() {
    if (bounds_.operators == OperatorSet::Paper) return Operator::And;
    return coin(rng_, 0.5) ? Operator::Or : Operator::And;
  }

  void mutate_output_slot(std::size_t i) {
    auto& row = rows_[i];
    const auto used = used_keys(i);
    std::vector<std::optional<OutputSignal>> options;
    for (auto o : kAllOutputs) {
      if (o != row.output && !used.contains({o, row.mode})) options.emplace_back(o);
    }
    if (i > 0 && row.opens_rung()) options.emplace_back(std::nullopt);
    if (options.empty()) return;
    const auto pick = options[uniform_index(rng_, options.size())];
    if (pick) {
      row.output = pick;
      row.op = Operator::Assign;
      return;
    }
    // The rung is folded into the one above it.
    row.output.reset();
    row.op = random_connective();
    set_mode_from(i, rows_[opener_of(i - 1)].mode);
  }

  void mutate_input(std::size_t i) {
    const auto current = rows_[i].input;
    std::size_t k = uniform_index(rng_, kInputCount - 1);
    if (k >= index(current)) ++k;
    rows_[i].input = kAllInputs[k];
  }

  void mutate_operator(std::size_t i) {
    auto& row = rows_[i];
    if (row.opens_rung() || bounds_.operators == OperatorSet::Paper) return;
    row.op = row.op == Operator::And ? Operator::Or : Operator::And;
  }

  void mutate_mode(std::size_t i) {
    const auto& row = rows_[i];
    if (!row.opens_rung()) return;
    const Mode other = row.mode == Mode::Automatic ? Mode::Manual : Mode::Automatic;
    if (used_keys(i).contains({*row.output, other})) return;
    set_mode_from(i, other);
  }

  GenomeRow random_literal_row() {
    GenomeRow row;
    row.input = kAllInputs[uniform_index(rng_, kInputCount)];
    row.negated = coin(rng_, 0.5);
    return row;
  }

  void insert_row() {
    const auto spans = genome::rung_spans(rows_);
    const auto used = used_keys();
    std::vector<RungKey> free_keys;
    for (auto m : {Mode::Automatic, Mode::Manual}) {
      for (auto o : kAllOutputs) {
        if (!used.contains({o, m})) free_keys.push_back({o, m});
      }
    }
    const bool new_rung = !free_keys.empty() && coin(rng_, 0.5);
    GenomeRow row = random_literal_row();
    if (new_rung) {
      const auto key = free_keys[uniform_index(rng_, free_keys.size())];
      row.output = key.first;
      row.mode = key.second;
      row.op = Operator::Assign;
      std::vector<std::size_t> boundaries;
      for (const auto& s : spans) boundaries.push_back(s.begin);
      boundaries.push_back(rows_.size());
      const auto at = boundaries[uniform_index(rng_, boundaries.size())];
      rows_.insert(rows_.begin() + static_cast<std::ptrdiff_t>(at), row);
      return;
    }
    const std::size_t at = 1 + uniform_index(rng_, rows_.size());
    row.op = random_connective();
    row.mode = rows_[opener_of(at - 1)].mode;
    rows_.insert(rows_.begin() + static_cast<std::ptrdiff_t>(at), row);
  }

  void delete_row(std::size_t j) {
    const GenomeRow removed = rows_[j];
    rows_.erase(rows_.begin() + static_cast<std::ptrdiff_t>(j));
    if (removed.opens_rung() && j < rows_.size() && !rows_[j].opens_rung()) {
      rows_[j].output = removed.output;
      rows_[j].op = Operator::Assign;
      rows_[j].mode = removed.mode;
    }
  }

  void swap_rungs() {
    const auto spans = genome::rung_spans(rows_);
    const std::size_t s = uniform_index(rng_, spans.size() - 1);
    const auto first = rows_.begin() + static_cast<std::ptrdiff_t>(spans[s].begin);
    const auto middle = rows_.begin() + static_cast<std::ptrdiff_t>(spans[s + 1].begin);
    const auto last = rows_.begin() + static_cast<std::ptrdiff_t>(spans[s + 1].end);
    std::rotate(first, middle, last);
  }

  std::vector<GenomeRow> rows_;
  const GenomeBounds& bounds_;
  Rng& rng_;
};

}  // namespace

Individual mutate(const Individual& individual, double rate, const GenomeBounds& bounds, Rng& rng) {
  Individual out = individual;
  if (rate <= 0.0 || individual.rows.empty()) return out;
  Mutator m(individual.rows, bounds, rng);
  m.mutate_fields(rate);
  if (coin(rng, rate)) m.structural_edit();
  out.rows = m.take();
  return out;
}

std::vector<double> crowding_distance(std::span<const ObjectiveVector> points) {
  const std::size_t n = points.size();
  std::vector<double> dist(n, 0.0);
  if (n <= 2) {
    std::fill(dist.begin(), dist.end(), std::numeric_limits<double>::infinity());
    return dist;
  }
  const std::array<double ObjectiveVector::*, 3> fields = {&ObjectiveVector::f1, &ObjectiveVector::f2,
                                                           &ObjectiveVector::f3};
  std::vector<std::size_t> order(n);
  for (auto field : fields) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return points[a].*field < points[b].*field; });
    const double lo = points[order.front()].*field;
    const double hi = points[order.back()].*field;
    dist[order.front()] = std::numeric_limits<double>::infinity();
    dist[order.back()] = std::numeric_limits<double>::infinity();
    if (hi <= lo) continue;
    for (std::size_t k = 1; k + 1 < n; ++k) {
      dist[order[k]] += (points[order[k + 1]].*field - points[order[k - 1]].*field) / (hi - lo);
    }
  }
  return dist;
}

namespace {

std::string genome_key(const Individual& ind) {
  std::string key;
  key.reserve(ind.rows.size() * 5);
  for (const auto& r : ind.rows) {
    key.push_back(static_cast<char>(r.output ? 1 + index(*r.output) : 0));
    key.push_back(static_cast<char>(index(r.input)));
    key.push_back(static_cast<char>(r.op));
    key.push_back(static_cast<char>(r.negated));
    key.push_back(static_cast<char>(r.mode));
  }
  return key;
}

// Evaluates with a genome-keyed memo; misses are spread over worker threads.
class EvaluationEngine {
 public:
  EvaluationEngine(const EvaluateFn& fn, std::size_t jobs) : fn_(fn), jobs_(std::max<std::size_t>(jobs, 1)) {}

  void evaluate(std::vector<EvaluatedIndividual>& batch) {
    std::vector<std::size_t> misses;
    std::vector<std::string> keys(batch.size());
    std::map<std::string, std::size_t> first_miss;
    for (std::size_t i = 0; i < batch.size(); ++i) {
      keys[i] = genome_key(batch[i].individual);
      if (cache_.contains(keys[i])) continue;
      if (first_miss.emplace(keys[i], i).second) misses.push_back(i);
    }
    std::vector<evaluate::Evaluation> results(misses.size());
    auto work = [&](std::size_t begin, std::size_t stride) {
      for (std::size_t k = begin; k < misses.size(); k += stride) results[k] = fn_(batch[misses[k]].individual);
    };
    if (jobs_ == 1 || misses.size() < 2) {
      work(0, 1);
    } else {
      std::vector<std::jthread> pool;
      const auto n = std::min(jobs_, misses.size());
      for (std::size_t t = 0; t < n; ++t) pool.emplace_back(work, t, n);
    }
    evaluations_ += misses.size();
    for (std::size_t k = 0; k < misses.size(); ++k) cache_.emplace(keys[misses[k]], results[k]);
    for (std::size_t i = 0; i < batch.size(); ++i) {
      const auto& e = cache_.at(keys[i]);
      batch[i].objectives = e.objectives;
      batch[i].feasible = e.feasible;
      batch[i].fitness = e.fitness;
    }
  }

  std::size_t evaluations() const { return evaluations_; }

 private:
  const EvaluateFn& fn_;
  std::size_t jobs_;
  std::unordered_map<std::string, evaluate::Evaluation> cache_;
  std::size_t evaluations_ = 0;
};

bool ranks_before(const EvaluatedIndividual& a, const EvaluatedIndividual& b) {
  if (a.feasible != b.feasible) return a.feasible;
  const double fa = a.fitness.value_or(0.0);
  const double fb = b.fitness.value_or(0.0);
  if (fa != fb) return fa > fb;
  return older(a.individual, b.individual);
}

std::vector<ObjectiveVector> objectives_of(std::span<const EvaluatedIndividual> members) {
  std::vector<ObjectiveVector> out;
  out.reserve(members.size());
  for (const auto& m : members) out.push_back(m.objectives);
  return out;
}

std::vector<EvaluatedIndividual> feasible_members(std::span<const EvaluatedIndividual> members) {
  std::vector<EvaluatedIndividual> out;
  for (const auto& m : members) {
    if (m.feasible) out.push_back(m);
  }
  return out;
}

GenerationStats stats_for(std::size_t generation, std::span<const EvaluatedIndividual> members) {
  GenerationStats s;
  s.generation = generation;
  double sum = 0.0;
  for (const auto& m : members) {
    const double f = m.fitness.value_or(0.0);
    sum += f;
    if (m.feasible) {
      ++s.feasible_count;
      s.best_fitness = std::max(s.best_fitness, f);
    }
  }
  s.mean_fitness = members.empty() ? 0.0 : sum / static_cast<double>(members.size());
  const auto feasible = feasible_members(members);
  const auto pts = objectives_of(feasible);
  for (auto i : evaluate::pareto_front_indices(pts)) s.front.push_back(pts[i]);
  s.front_size = s.front.size();
  return s;
}

ColdEntry cold_entry(const EvaluatedIndividual& m, std::size_t generation, std::string reason) {
  return {m.individual.id, m.individual.generation_born, generation, m.objectives, m.fitness.value_or(0.0),
          m.feasible, std::move(reason)};
}

class Engine {
 public:
  Engine(const EvolutionConfig& config, const EvaluateFn& evaluator)
      : config_(config), evaluations_(evaluator, config.jobs) {}

  EvolutionResult run(std::optional<Population> initial) {
    EvolutionResult result;
    result.population.capacity = config_.population_size;
    auto& members = result.population.members;
    if (initial) {
      members = std::move(initial->members);
      for (const auto& m : members) next_id_ = std::max(next_id_, m.individual.id + 1);
    } else {
      for (std::size_t slot = 0; slot < config_.population_size; ++slot) {
        Rng rng = derive_rng(config_.seed, kInitialStream, slot);
        members.push_back(fresh(genome::random_individual(rng, config_.bounds), 0));
      }
    }
    evaluations_.evaluate(members);
    if (config_.mode == PaMode::Progressive) members = prune_archive(std::move(members), 0, result.cold_store);
    result.history.push_back(stats_for(0, members));

    for (std::size_t gen = 1; gen <= config_.generations; ++gen) {
      if (config_.mode == PaMode::Prior) {
        members = prior_generation(members, gen, result.cold_store);
      } else {
        members = progressive_generation(members, gen, result.cold_store);
      }
      result.history.push_back(stats_for(gen, members));
      spdlog::debug("generation {}: best {:.6f}, front {}, feasible {}", gen, result.history.back().best_fitness,
                    result.history.back().front_size, result.history.back().feasible_count);
    }
    result.evaluations = evaluations_.evaluations();
    return result;
  }

 private:
  static constexpr std::uint64_t kInitialStream = 0xA11CE;

  EvaluatedIndividual fresh(Individual ind, std::size_t generation) {
    ind.id = next_id_++;
    ind.generation_born = static_cast<std::uint32_t>(generation);
    return {std::move(ind), {}, std::nullopt, false};
  }

  Individual offspring(std::span<const EvaluatedIndividual> pool, std::size_t generation, std::size_t slot) {
    Rng rng = derive_rng(config_.seed, generation, slot);
    if (pool.empty()) return genome::random_individual(rng, config_.bounds);
    std::vector<Individual> parents;
    for (std::size_t k = 0; k < config_.parents; ++k) parents.push_back(pool[uniform_index(rng, pool.size())].individual);
    Individual child = recombine(parents, rng, config_.bounds);
    return mutate(child, config_.mutation_rate, config_.bounds, rng);
  }

  std::vector<EvaluatedIndividual> prior_generation(const std::vector<EvaluatedIndividual>& current,
                                                    std::size_t gen, std::vector<ColdEntry>& cold) {
    std::vector<EvaluatedIndividual> ranked = current;
    std::stable_sort(ranked.begin(), ranked.end(), ranks_before);

    Population view{current, config_.population_size};
    const std::size_t truncation = std::max(config_.parents, config_.population_size / 2);
    const auto pool = select(view, truncation, Direction::Maximize, SelectionKey::Fitness);

    std::vector<EvaluatedIndividual> next(ranked.begin(), ranked.begin() + static_cast<std::ptrdiff_t>(std::min(config_.elitism, ranked.size())));
    const std::size_t elites = next.size();
    std::vector<EvaluatedIndividual> children;
    for (std::size_t slot = 0; elites + children.size() < config_.population_size; ++slot) {
      children.push_back(fresh(offspring(pool, gen, slot), gen));
    }
    evaluations_.evaluate(children);
    next.insert(next.end(), std::make_move_iterator(children.begin()), std::make_move_iterator(children.end()));

    const auto survivors = objectives_of(feasible_members(next));
    for (std::size_t i = elites; i < ranked.size(); ++i) {
      const auto& m = ranked[i];
      std::string reason = "displaced";
      if (!m.feasible) {
        reason = "infeasible";
      } else if (std::any_of(survivors.begin(), survivors.end(), [&](const auto& s) { return evaluate::dominates(s, m.objectives); })) {
        reason = "dominated";
      }
      cold.push_back(cold_entry(m, gen, std::move(reason)));
    }
    return next;
  }

  std::vector<EvaluatedIndividual> progressive_generation(const std::vector<EvaluatedIndividual>& archive,
                                                          std::size_t gen, std::vector<ColdEntry>& cold) {
    const auto pool = feasible_members(archive);
    std::vector<EvaluatedIndividual> children;
    for (std::size_t slot = 0; slot < config_.population_size; ++slot) {
      children.push_back(fresh(offspring(pool, gen, slot), gen));
    }
    evaluations_.evaluate(children);
    std::vector<EvaluatedIndividual> merged = archive;
    merged.insert(merged.end(), std::make_move_iterator(children.begin()), std::make_move_iterator(children.end()));
    return prune_archive(std::move(merged), gen, cold);
  }

  // Keeps the oldest copy of each genome, drops infeasible members when any
  // feasible one exists, then dominated ones, then the most crowded until the
  // archive fits its capacity.
  std::vector<EvaluatedIndividual> prune_archive(std::vector<EvaluatedIndividual> merged, std::size_t gen,
                                                 std::vector<ColdEntry>& cold) {
    std::stable_sort(merged.begin(), merged.end(),
                     [](const auto& a, const auto& b) { return older(a.individual, b.individual); });
    std::set<std::string> seen;
    std::vector<EvaluatedIndividual> unique;
    for (auto& m : merged) {
      if (seen.insert(genome_key(m.individual)).second) unique.push_back(std::move(m));
    }

    const bool any_feasible = std::any_of(unique.begin(), unique.end(), [](const auto& m) { return m.feasible; });
    std::vector<EvaluatedIndividual> candidates;
    for (auto& m : unique) {
      if (any_feasible && !m.feasible) {
        cold.push_back(cold_entry(m, gen, "infeasible"));
      } else {
        candidates.push_back(std::move(m));
      }
    }

    const auto pts = objectives_of(candidates);
    const auto front = evaluate::pareto_front_indices(pts);
    std::vector<char> keep(candidates.size(), 0);
    for (auto i : front) keep[i] = 1;
    std::vector<EvaluatedIndividual> archive;
    for (std::size_t i = 0; i < candidates.size(); ++i) {
      if (keep[i]) {
        archive.push_back(std::move(candidates[i]));
      } else {
        cold.push_back(cold_entry(candidates[i], gen, "dominated"));
      }
    }

    while (archive.size() > config_.population_size) {
      const auto dist = crowding_distance(objectives_of(archive));
      std::size_t victim = 0;
      for (std::size_t i = 1; i < archive.size(); ++i) {
        if (dist[i] < dist[victim] || (dist[i] == dist[victim] && older(archive[victim].individual, archive[i].individual))) {
          victim = i;
        }
      }
      cold.push_back(cold_entry(archive[victim], gen, "crowded"));
      archive.erase(archive.begin() + static_cast<std::ptrdiff_t>(victim));
    }
    return archive;
  }

  const EvolutionConfig& config_;
  EvaluationEngine evaluations_;
  std::uint64_t next_id_ = 0;
};

}  // namespace

EvolutionResult evolve(const EvolutionConfig& config, const EvaluateFn& evaluator, std::optional<Population> initial) {
  if (const auto problems = config.problems(); !problems.empty()) {
    throw ConfigError(fmt::format("invalid evolution config: {}", fmt::join(problems, "; ")));
  }
  return Engine(config, evaluator).run(std::move(initial));
}

std::string history_csv(std::span<const GenerationStats> history) {
  std::string out = "generation,best_fitness,mean_fitness,front_size,feasible_count\n";
  for (const auto& h : history) {
    out += fmt::format("{},{},{},{},{}\n", h.generation, h.best_fitness, h.mean_fitness, h.front_size,
                       h.feasible_count);
  }
  return out;
}

}  // namespace evoplc::evolution

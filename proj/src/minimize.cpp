#include "evoplc/minimize.hpp"

#include <algorithm>
#include <bit>

namespace evoplc::codegen {

std::size_t Cube::literal_count() const { return static_cast<std::size_t>(std::popcount(care)); }

TruthTable Cube::table() const {
  TruthTable t = kTableTrue;
  for (auto s : kAllInputs) {
    const auto bit = static_cast<std::uint8_t>(1U << index(s));
    if (care & bit) t &= literal_table({s, (value & bit) == 0});
  }
  return t;
}

std::vector<Cube> prime_implicants(TruthTable on_set) {
  std::vector<Cube> primes;
  if (on_set == kTableFalse) return primes;
  constexpr unsigned kFull = (1U << kInputCount) - 1;
  auto implicant = [on_set](Cube c) { return (c.table() & ~on_set) == 0; };
  for (unsigned care = 0; care <= kFull; ++care) {
    // Enumerate every polarity assignment of the cared-for inputs.
    for (unsigned value = care;; value = (value - 1) & care) {
      const Cube c{static_cast<std::uint8_t>(care), static_cast<std::uint8_t>(value)};
      if (implicant(c)) {
        bool prime = true;
        for (unsigned bit = 1; bit <= kFull && prime; bit <<= 1) {
          if (!(care & bit)) continue;
          const Cube wider{static_cast<std::uint8_t>(care & ~bit), static_cast<std::uint8_t>(value & ~bit)};
          if (implicant(wider)) prime = false;
        }
        if (prime) primes.push_back(c);
      }
      if (value == 0) break;
    }
  }
  std::sort(primes.begin(), primes.end());
  return primes;
}

namespace {

struct CoverSearch {
  std::vector<Cube> primes;
  std::vector<TruthTable> tables;
  std::vector<Cube> chosen;
  std::vector<Cube> best;
  bool have_best = false;

  static std::size_t literals(const std::vector<Cube>& cover) {
    std::size_t n = 0;
    for (const auto& c : cover) n += c.literal_count();
    return n;
  }

  bool better(const std::vector<Cube>& candidate) const {
    if (!have_best) return true;
    if (candidate.size() != best.size()) return candidate.size() < best.size();
    const auto lc = literals(candidate);
    const auto lb = literals(best);
    if (lc != lb) return lc < lb;
    return candidate < best;
  }

  void run(TruthTable uncovered) {
    if (uncovered == 0) {
      auto candidate = chosen;
      std::sort(candidate.begin(), candidate.end());
      if (better(candidate)) {
        best = std::move(candidate);
        have_best = true;
      }
      return;
    }
    if (have_best && chosen.size() + 1 > best.size()) return;

    // Branch on the minterm with the fewest covering primes.
    std::size_t pick = 0;
    std::size_t pick_count = primes.size() + 1;
    for (std::size_t m = 0; m < kImageCount; ++m) {
      if (!table_at(uncovered, m)) continue;
      std::size_t count = 0;
      for (auto t : tables) count += table_at(t, m) ? 1 : 0;
      if (count < pick_count) {
        pick = m;
        pick_count = count;
      }
    }
    for (std::size_t i = 0; i < primes.size(); ++i) {
      if (!table_at(tables[i], pick)) continue;
      chosen.push_back(primes[i]);
      run(uncovered & ~tables[i]);
      chosen.pop_back();
    }
  }
};

}  // namespace

std::vector<Cube> minimize_sop(TruthTable on_set) {
  if (on_set == kTableFalse) return {};
  CoverSearch search;
  search.primes = prime_implicants(on_set);
  for (const auto& p : search.primes) search.tables.push_back(p.table());
  search.run(on_set);
  return search.best;
}

TruthTable cover_table(std::span<const Cube> cover) {
  TruthTable t = kTableFalse;
  for (const auto& c : cover) t |= c.table();
  return t;
}

std::string render_sop(std::span<const Cube> cover) {
  if (cover.empty()) return "FALSE";
  std::string out;
  for (std::size_t i = 0; i < cover.size(); ++i) {
    const Cube& c = cover[i];
    if (i > 0) out += " OR ";
    if (c.care == 0) {
      out += "TRUE";
      continue;
    }
    const bool wrap = cover.size() > 1 && c.literal_count() > 1;
    if (wrap) out += '(';
    bool first = true;
    for (auto s : kAllInputs) {
      const auto bit = static_cast<std::uint8_t>(1U << index(s));
      if (!(c.care & bit)) continue;
      if (!first) out += " AND ";
      if (!(c.value & bit)) out += "NOT ";
      out += name(s);
      first = false;
    }
    if (wrap) out += ')';
  }
  return out;
}

}  // namespace evoplc::codegen

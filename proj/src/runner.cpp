#include "evoplc/runner.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <set>
#include <sstream>

#include <fmt/chrono.h>
#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "evoplc/codegen.hpp"
#include "evoplc/errors.hpp"
#include "evoplc/genome_json.hpp"

namespace evoplc::cli {

namespace fs = std::filesystem;
using evolution::EvaluatedIndividual;
using evolution::PaMode;
using nlohmann::ordered_json;

namespace {

const char* mode_name(PaMode mode) { return mode == PaMode::Prior ? "prior" : "progressive"; }

void write_text(const fs::path& dir, const std::string& rel, const std::string& content,
                std::vector<std::string>* files = nullptr) {
  const fs::path path = dir / rel;
  std::error_code ec;
  fs::create_directories(path.parent_path(), ec);
  if (ec) throw IoError(fmt::format("cannot create '{}': {}", path.parent_path().string(), ec.message()));
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << content;
  out.close();
  if (!out) throw IoError(fmt::format("cannot write '{}'", path.string()));
  if (files) files->push_back(rel);
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(fmt::format("cannot read '{}'", path.string()));
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void prepare_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError(fmt::format("cannot create '{}': {}", dir.string(), ec.message()));
  for (const char* stale : {"FAILED", "report.json", "front", "program.st", "program.il", "summary.txt", "genome.json",
                            "trace.csv", "cold_store.csv"}) {
    fs::remove_all(dir / stale, ec);
  }
}

ordered_json objectives_json(const evaluate::ObjectiveVector& v) { return {{"f1", v.f1}, {"f2", v.f2}, {"f3", v.f3}}; }

std::vector<evaluate::ObjectiveVector> objectives_of(std::span<const EvaluatedIndividual> members, bool feasible_only) {
  std::vector<evaluate::ObjectiveVector> out;
  for (const auto& m : members) {
    if (!feasible_only || m.feasible) out.push_back(m.objectives);
  }
  return out;
}

codegen::Provenance provenance(const EvaluatedIndividual& m, const RunConfig& config) {
  return {
      {"profile", config.profile},
      {"mode", mode_name(config.evolution.mode)},
      {"seed", fmt::format("{}", config.evolution.seed)},
      {"individual", fmt::format("{} (born in generation {})", m.individual.id, m.individual.generation_born)},
      {"objectives", fmt::format("f1={} f2={} f3={}", m.objectives.f1, m.objectives.f2, m.objectives.f3)},
      {"fitness", fmt::format("{}", m.fitness.value_or(0.0))},
  };
}

// program.st, program.il, summary.txt, genome.json and trace.csv under `prefix`.
void emit_individual(const fs::path& dir, const std::string& prefix, const EvaluatedIndividual& m,
                     const RunConfig& config, const evaluate::Evaluator& evaluator, std::vector<std::string>& files) {
  const auto prov = provenance(m, config);
  write_text(dir, prefix + "program.st", codegen::emit_structured_text(m.individual, prov).text(), &files);
  write_text(dir, prefix + "program.il", codegen::emit_instruction_list(m.individual, prov), &files);
  write_text(dir, prefix + "summary.txt", codegen::derive_behavior_summary(m.individual).text(prov), &files);
  write_text(dir, prefix + "genome.json", genome::to_json_text(m.individual), &files);
  if (config.output.write_trace) {
    write_text(dir, prefix + "trace.csv", plant::trace_csv(evaluator.trace(m.individual)), &files);
  }
}

std::string timestamp_utc() {
  return fmt::format("{:%Y-%m-%dT%H:%M:%SZ}", fmt::gmtime(std::chrono::system_clock::to_time_t(std::chrono::system_clock::now())));
}

}  // namespace

int exit_code_for_current_exception() {
  try {
    throw;
  } catch (const ConfigError&) {
    return kExitConfig;
  } catch (const ParseError&) {
    return kExitConfig;
  } catch (const DecodeError&) {
    return kExitConfig;
  } catch (const SpaceTooLarge&) {
    return kExitConfig;
  } catch (const IoError&) {
    return kExitIo;
  } catch (const fs::filesystem_error&) {
    return kExitIo;
  } catch (...) {
    return kExitEvolution;
  }
}

evolution::EvolutionResult run_evolution(const RunConfig& config) {
  if (const auto problems = config.problems(); !problems.empty()) {
    throw ConfigError(fmt::format("invalid config: {}", problems.front()));
  }
  const evaluate::Evaluator evaluator(config.evaluation_setup());
  return evolution::evolve(config.evolution, [&](const genome::Individual& ind) { return evaluator(ind); });
}

std::vector<EvaluatedIndividual> feasible_front(const evolution::Population& population) {
  std::vector<EvaluatedIndividual> feasible;
  for (const auto& m : population.members) {
    if (m.feasible) feasible.push_back(m);
  }
  const auto pts = objectives_of(feasible, false);
  std::vector<EvaluatedIndividual> out;
  for (auto i : evaluate::pareto_front_indices(pts)) out.push_back(feasible[i]);
  return out;
}

std::optional<EvaluatedIndividual> knee_point(std::span<const EvaluatedIndividual> front) {
  if (front.empty()) return std::nullopt;
  evolution::Population view{{front.begin(), front.end()}, front.size()};
  const auto best = evolution::select(view, 1, evolution::Direction::Maximize, evolution::SelectionKey::Fitness);
  if (best.empty()) return std::nullopt;
  return best.front();
}

std::string objectives_csv(std::span<const EvaluatedIndividual> members, std::span<const EvaluatedIndividual> front) {
  std::set<std::uint64_t> on_front;
  for (const auto& m : front) on_front.insert(m.individual.id);
  std::string out = "id,f1,f2,f3,fitness,feasible,front_member\n";
  for (const auto& m : members) {
    out += fmt::format("{},{},{},{},{},{},{}\n", m.individual.id, m.objectives.f1, m.objectives.f2, m.objectives.f3,
                       m.fitness.value_or(0.0), m.feasible ? 1 : 0, on_front.count(m.individual.id) ? 1 : 0);
  }
  return out;
}

ordered_json front_json(std::span<const EvaluatedIndividual> front, PaMode mode, std::uint64_t seed) {
  ordered_json members = ordered_json::array();
  for (const auto& m : front) {
    members.push_back({{"id", m.individual.id},
                       {"generation_born", m.individual.generation_born},
                       {"objectives", objectives_json(m.objectives)},
                       {"fitness", m.fitness.value_or(0.0)},
                       {"feasible", m.feasible},
                       {"genome", genome::rows_to_json(m.individual)}});
  }
  return {{"schema_version", kArtifactSchemaVersion}, {"mode", mode_name(mode)}, {"seed", seed}, {"members", members}};
}

std::string cold_store_csv(std::span<const evolution::ColdEntry> entries) {
  std::string out = "id,generation_born,removed_in,f1,f2,f3,fitness,feasible,reason\n";
  for (const auto& c : entries) {
    out += fmt::format("{},{},{},{},{},{},{},{},{}\n", c.id, c.generation_born, c.removed_in, c.objectives.f1,
                       c.objectives.f2, c.objectives.f3, c.fitness, c.feasible ? 1 : 0, c.reason);
  }
  return out;
}

RunReport run(const RunConfig& config) {
  const fs::path dir = config.output.dir;
  prepare_dir(dir);
  try {
    const evaluate::Evaluator evaluator(config.evaluation_setup());
    spdlog::info("{} run, seed {}, {} generations", mode_name(config.evolution.mode), config.evolution.seed,
                 config.evolution.generations);
    const auto result = evolution::evolve(config.evolution, [&](const genome::Individual& ind) { return evaluator(ind); });

    RunReport report;
    report.mode = config.evolution.mode;
    report.seed = config.evolution.seed;
    report.generations = config.evolution.generations;
    report.evaluations = result.evaluations;
    report.front = feasible_front(result.population);
    report.best_fitness = result.history.back().best_fitness;

    auto& files = report.files;
    write_text(dir, "history.csv", evolution::history_csv(result.history), &files);
    write_text(dir, "objectives.csv", objectives_csv(result.population.members, report.front), &files);
    write_text(dir, "front.json", front_json(report.front, report.mode, report.seed).dump(2) + "\n", &files);
    if (config.output.write_cold_store) write_text(dir, "cold_store.csv", cold_store_csv(result.cold_store), &files);

    std::optional<EvaluatedIndividual> best;
    if (report.mode == PaMode::Prior) {
      const auto& members = result.population.members;
      if (std::any_of(members.begin(), members.end(), [](const auto& m) { return m.feasible; })) {
        best = evolution::select(result.population, 1, evolution::Direction::Maximize, evolution::SelectionKey::Fitness).front();
        emit_individual(dir, "", *best, config, evaluator, files);
      }
    } else {
      best = knee_point(report.front);
      if (best) emit_individual(dir, "", *best, config, evaluator, files);
      for (const auto& m : report.front) emit_individual(dir, fmt::format("front/member_{}/", m.individual.id), m, config, evaluator, files);
    }
    if (best) {
      report.best_id = best->individual.id;
    } else {
      spdlog::warn("no feasible individual survived; no program emitted");
    }
    std::sort(files.begin(), files.end());

    ordered_json manifest = {
        {"schema_version", kArtifactSchemaVersion},
        {"timestamp", timestamp_utc()},
        {"profile", config.profile},
        {"mode", mode_name(report.mode)},
        {"seed", report.seed},
        {"generations", report.generations},
        {"evaluations", report.evaluations},
        {"best_fitness", report.best_fitness},
        {"best_id", report.best_id ? ordered_json(*report.best_id) : ordered_json(nullptr)},
        {"front_size", report.front.size()},
        {"files", files},
    };
    write_text(dir, "report.json", manifest.dump(2) + "\n");
    spdlog::info("done: best fitness {}, front size {}, {} evaluations", report.best_fitness, report.front.size(),
                 report.evaluations);
    return report;
  } catch (const std::exception& e) {
    std::ofstream marker(dir / "FAILED", std::ios::binary | std::ios::trunc);
    marker << e.what() << "\n";
    throw;
  }
}

double coverage(std::span<const evaluate::ObjectiveVector> a, std::span<const evaluate::ObjectiveVector> b) {
  if (b.empty()) return 0.0;
  const auto covered = std::count_if(b.begin(), b.end(), [&](const auto& y) {
    return std::any_of(a.begin(), a.end(), [&](const auto& x) { return evaluate::dominates(x, y); });
  });
  return static_cast<double>(covered) / static_cast<double>(b.size());
}

ComparisonReport compare(const RunConfig& prior, const RunConfig& progressive, std::span<const std::uint64_t> seeds,
                         const fs::path& out_dir) {
  if (!(prior.scenario == progressive.scenario)) throw ConfigError("compared configs must share plant and scenario");
  if (seeds.empty()) throw ConfigError("compare needs at least one seed");
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw IoError(fmt::format("cannot create '{}': {}", out_dir.string(), ec.message()));

  ComparisonReport report;
  std::string csv = "mode,seed,id,f1,f2,f3,fitness,feasible\n";
  std::vector<EvaluatedIndividual> all_prior;
  std::vector<EvaluatedIndividual> all_progressive;
  for (auto seed : seeds) {
    for (const RunConfig* base : {&prior, &progressive}) {
      RunConfig cfg = *base;
      cfg.evolution.seed = seed;
      cfg.evolution.mode = base == &prior ? PaMode::Prior : PaMode::Progressive;
      const auto result = run_evolution(cfg);
      auto& sink = base == &prior ? all_prior : all_progressive;
      for (const auto& m : result.population.members) {
        csv += fmt::format("{},{},{},{},{},{},{},{}\n", mode_name(cfg.evolution.mode), seed, m.individual.id,
                           m.objectives.f1, m.objectives.f2, m.objectives.f3, m.fitness.value_or(0.0), m.feasible ? 1 : 0);
        sink.push_back(m);
      }
    }
  }
  report.prior_rows = all_prior.size();
  report.progressive_rows = all_progressive.size();

  const auto prior_pts = objectives_of(all_prior, true);
  const auto progressive_pts = objectives_of(all_progressive, true);
  std::vector<evaluate::ObjectiveVector> prior_front;
  for (auto i : evaluate::pareto_front_indices(prior_pts)) prior_front.push_back(prior_pts[i]);
  std::vector<evaluate::ObjectiveVector> progressive_front;
  for (auto i : evaluate::pareto_front_indices(progressive_pts)) progressive_front.push_back(progressive_pts[i]);
  report.progressive_covers_prior = coverage(progressive_front, prior_pts);
  report.prior_covers_progressive = coverage(prior_front, progressive_pts);

  write_text(out_dir, "comparison.csv", csv, &report.files);
  const ordered_json summary = {
      {"schema_version", kArtifactSchemaVersion},
      {"seeds", std::vector<std::uint64_t>(seeds.begin(), seeds.end())},
      {"prior_rows", report.prior_rows},
      {"progressive_rows", report.progressive_rows},
      {"progressive_covers_prior", report.progressive_covers_prior},
      {"prior_covers_progressive", report.prior_covers_progressive},
  };
  write_text(out_dir, "comparison.json", summary.dump(2) + "\n", &report.files);
  return report;
}

OracleResult oracle(const RunConfig& config, const fs::path& out_dir) {
  const evaluate::Evaluator evaluator(config.evaluation_setup());
  auto result = enumerate_oracle(evaluator, config.evolution.jobs);
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw IoError(fmt::format("cannot create '{}': {}", out_dir.string(), ec.message()));

  std::vector<char> on_front(result.individuals.size(), 0);
  for (auto i : result.front) on_front[i] = 1;
  std::string csv = "index,f1,f2,f3,fitness,feasible,front_member\n";
  for (std::size_t i = 0; i < result.individuals.size(); ++i) {
    const auto& e = result.evaluations[i];
    csv += fmt::format("{},{},{},{},{},{},{}\n", i, e.objectives.f1, e.objectives.f2, e.objectives.f3, e.fitness,
                       e.feasible ? 1 : 0, on_front[i] ? 1 : 0);
  }
  write_text(out_dir, "oracle_objectives.csv", csv);

  ordered_json members = ordered_json::array();
  for (auto i : result.front) {
    const auto& e = result.evaluations[i];
    members.push_back({{"index", i},
                       {"objectives", objectives_json(e.objectives)},
                       {"fitness", e.fitness},
                       {"genome", genome::rows_to_json(result.individuals[i])}});
  }
  const ordered_json doc = {{"schema_version", kArtifactSchemaVersion},
                            {"space_size", result.individuals.size()},
                            {"members", members}};
  write_text(out_dir, "oracle_front.json", doc.dump(2) + "\n");
  spdlog::info("oracle: {} individuals, {} on the front", result.individuals.size(), result.front.size());
  return result;
}

std::vector<std::string> decode_file(const fs::path& genome_json, const fs::path& out_dir) {
  const auto individual = genome::from_json_text(read_text(genome_json));
  if (const auto violations = genome::validate(individual); !violations.empty()) {
    throw DecodeError(fmt::format("row {}: {}", violations.front().row, violations.front().message));
  }
  const codegen::Provenance prov = {{"source", genome_json.filename().string()}};
  std::vector<std::string> files;
  write_text(out_dir, "program.st", codegen::emit_structured_text(individual, prov).text(), &files);
  write_text(out_dir, "program.il", codegen::emit_instruction_list(individual, prov), &files);
  write_text(out_dir, "summary.txt", codegen::derive_behavior_summary(individual).text(prov), &files);
  return files;
}

}  // namespace evoplc::cli

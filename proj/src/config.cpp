#include "evoplc/config.hpp"

#include <algorithm>
#include <array>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>

#include <fmt/format.h>
#include <fmt/ranges.h>
#include <toml.hpp>

#include "evoplc/errors.hpp"

namespace evoplc::cli {

namespace {

// Typed access to one TOML table. Every key read is recorded so that
// leftovers can be reported as unknown.
class Section {
 public:
  Section(const toml::table* table, std::string name) : table_(table), name_(std::move(name)) {}

  bool present() const { return table_ != nullptr; }

  const toml::node* node(std::string_view key) {
    seen_.emplace(key);
    return table_ ? table_->get(key) : nullptr;
  }

  void number(std::string_view key, double& out) {
    if (const auto* n = node(key)) {
      if (auto v = n->value<double>(); v && (n->is_floating_point() || n->is_integer())) {
        out = *v;
      } else {
        fail(key, "a number");
      }
    }
  }

  template <class Int>
  void integer(std::string_view key, Int& out) {
    if (const auto* n = node(key)) {
      const auto v = n->value<std::int64_t>();
      if (!n->is_integer() || !v || *v < 0) fail(key, "a non-negative integer");
      out = static_cast<Int>(*v);
    }
  }

  void boolean(std::string_view key, bool& out) {
    if (const auto* n = node(key)) {
      if (!n->is_boolean()) fail(key, "a boolean");
      out = *n->value<bool>();
    }
  }

  std::optional<std::string> string(std::string_view key) {
    if (const auto* n = node(key)) {
      if (!n->is_string()) fail(key, "a string");
      return *n->value<std::string>();
    }
    return std::nullopt;
  }

  template <std::size_t N>
  void numbers(std::string_view key, std::array<double, N>& out) {
    const auto* n = node(key);
    if (!n) return;
    const auto* arr = n->as_array();
    if (!arr || arr->size() != N) fail(key, fmt::format("an array of {} numbers", N));
    for (std::size_t i = 0; i < N; ++i) {
      const auto& e = *arr->get(i);
      if (!(e.is_floating_point() || e.is_integer())) fail(key, fmt::format("an array of {} numbers", N));
      out[i] = *e.value<double>();
    }
  }

  void finish(std::initializer_list<std::string_view> subtables = {}) const {
    if (!table_) return;
    for (const auto& [k, v] : *table_) {
      const std::string key(k.str());
      if (seen_.count(key)) continue;
      if (std::find(subtables.begin(), subtables.end(), key) != subtables.end()) continue;
      throw ConfigError(fmt::format("unknown key '{}' in {}", key, name_));
    }
  }

  [[noreturn]] void fail(std::string_view key, std::string_view expected) const {
    throw ConfigError(fmt::format("{}.{} must be {}", name_, key, expected));
  }

 private:
  const toml::table* table_;
  std::string name_;
  std::set<std::string, std::less<>> seen_;
};

toml::table parse_toml(std::string_view text, std::string_view what) {
  try {
    return toml::parse(text);
  } catch (const toml::parse_error& e) {
    const auto& at = e.source().begin;
    throw ConfigError(fmt::format("{}: line {}, column {}: {}", what, at.line, at.column, e.description()));
  }
}

const toml::table* subtable(const toml::table& root, std::string_view key) {
  const auto* n = root.get(key);
  if (!n) return nullptr;
  if (!n->is_table()) throw ConfigError(fmt::format("[{}] must be a table", key));
  return n->as_table();
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(fmt::format("cannot read '{}'", path.string()));
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<plant::InputSegment> parse_inputs(const toml::node* node, std::string_view where) {
  const auto* arr = node ? node->as_array() : nullptr;
  if (!arr) throw ConfigError(fmt::format("{} must be an array of tables", where));
  std::vector<plant::InputSegment> out;
  for (std::size_t i = 0; i < arr->size(); ++i) {
    const auto* t = arr->get(i)->as_table();
    if (!t) throw ConfigError(fmt::format("{} must be an array of tables", where));
    Section s(t, fmt::format("{}[{}]", where, i));
    plant::InputSegment seg;
    s.number("t_start", seg.t_start);
    s.boolean("B1", seg.buttons[0]);
    s.boolean("B2", seg.buttons[1]);
    s.boolean("B3", seg.buttons[2]);
    s.finish();
    out.push_back(seg);
  }
  return out;
}

plant::PlantParams parse_plant(Section s, plant::PlantParams p) {
  s.number("tank_capacity", p.tank_capacity);
  s.number("q1", p.q1);
  s.number("q2", p.q2);
  s.number("q3", p.q3);
  s.numbers("thresholds", p.thresholds);
  s.number("hysteresis", p.hysteresis);
  s.number("dt", p.dt);
  s.number("initial_level", p.initial_level);
  s.finish();
  return p;
}

genome::OperatorSet parse_operators(const std::string& v) {
  if (v == "full") return genome::OperatorSet::Full;
  if (v == "paper") return genome::OperatorSet::Paper;
  throw ConfigError(fmt::format("genome.operators must be \"full\" or \"paper\", not \"{}\"", v));
}

evolution::PaMode parse_mode(const std::string& v) {
  if (v == "prior") return evolution::PaMode::Prior;
  if (v == "progressive") return evolution::PaMode::Progressive;
  throw ConfigError(fmt::format("evolution.mode must be \"prior\" or \"progressive\", not \"{}\"", v));
}

evaluate::Transport parse_transport(const std::string& v) {
  if (v == "outflow") return evaluate::Transport::Outflow;
  if (v == "inflow") return evaluate::Transport::Inflow;
  throw ConfigError(fmt::format("fitness.transport must be \"outflow\" or \"inflow\", not \"{}\"", v));
}

}  // namespace

std::vector<std::string> RunConfig::problems() const {
  auto out = scenario.problems();
  for (auto& p : evolution.problems()) out.push_back(std::move(p));
  for (auto& p : fitness.problems(evolution.bounds.r_max)) out.push_back(std::move(p));
  if (evolution.jobs == 0) out.emplace_back("jobs must be at least 1");
  if (std::any_of(objectives.energy_weights.begin(), objectives.energy_weights.end(), [](double w) { return w < 0; })) {
    out.emplace_back("energy weights must be non-negative");
  }
  if (output.dir.empty()) out.emplace_back("output directory must not be empty");
  return out;
}

evaluate::EvaluationSetup RunConfig::evaluation_setup() const {
  evaluate::EvaluationSetup s;
  s.scenario = scenario;
  s.bounds = evolution.bounds;
  s.objectives = objectives;
  s.fitness = fitness;
  s.constraints = constraints;
  return s;
}

plant::Scenario parse_scenario(std::string_view text, const plant::PlantParams& params) {
  const auto root = parse_toml(text, "scenario");
  Section s(&root, "scenario file");
  plant::Scenario sc = plant::Scenario::automatic(parse_plant(Section(subtable(root, "plant"), "scenario plant"), params));
  s.number("duration", sc.duration);
  if (const auto* inputs = s.node("inputs")) sc.inputs = parse_inputs(inputs, "inputs");
  s.finish({"plant"});
  return sc;
}

RunConfig parse_config(std::string_view text, const std::filesystem::path& base_dir) {
  const auto root = parse_toml(text, "config");
  RunConfig cfg;

  Section top(&root, "config");
  if (auto v = top.string("profile")) cfg.profile = *v;
  top.finish({"plant", "scenario", "genome", "evolution", "fitness", "constraints", "output"});

  const auto params = parse_plant(Section(subtable(root, "plant"), "plant"), {});

  Section sc(subtable(root, "scenario"), "scenario");
  std::optional<double> duration;
  if (sc.node("duration")) {
    double d = 0.0;
    sc.number("duration", d);
    duration = d;
  }
  if (auto file = sc.string("file")) {
    if (sc.node("inputs")) throw ConfigError("scenario.file and scenario.inputs are mutually exclusive");
    cfg.scenario = parse_scenario(read_file(base_dir / *file), params);
  } else {
    cfg.scenario = plant::Scenario::automatic(params);
    if (const auto* inputs = sc.node("inputs")) cfg.scenario.inputs = parse_inputs(inputs, "scenario.inputs");
  }
  if (duration) cfg.scenario.duration = *duration;
  sc.finish();

  auto& evo = cfg.evolution;
  Section g(subtable(root, "genome"), "genome");
  g.integer("r_min", evo.bounds.r_min);
  g.integer("r_max", evo.bounds.r_max);
  if (auto v = g.string("operators")) evo.bounds.operators = parse_operators(*v);
  g.finish();

  Section e(subtable(root, "evolution"), "evolution");
  if (auto v = e.string("mode")) evo.mode = parse_mode(*v);
  e.integer("population", evo.population_size);
  e.integer("generations", evo.generations);
  e.integer("parents", evo.parents);
  e.number("mutation_rate", evo.mutation_rate);
  e.integer("elitism", evo.elitism);
  e.integer("seed", evo.seed);
  e.integer("jobs", evo.jobs);
  e.finish();

  Section f(subtable(root, "fitness"), "fitness");
  if (auto v = f.string("transport")) cfg.objectives.transport = parse_transport(*v);
  f.numbers("energy_weights", cfg.objectives.energy_weights);
  f.numbers("alpha", cfg.fitness.alpha);
  cfg.fitness.p_trans = evaluate::default_p_trans(cfg.scenario, cfg.objectives.transport);
  f.number("p_trans", cfg.fitness.p_trans);
  const auto r_max = static_cast<double>(evo.bounds.r_max);
  cfg.fitness.p_code = r_max > 4 ? r_max - 4 : r_max;
  f.number("p_code", cfg.fitness.p_code);
  f.number("p_energy_target", cfg.fitness.p_energy_target);
  f.boolean("clamp_negative", cfg.fitness.clamp_negative);
  f.finish();
  cfg.objectives.r_max = evo.bounds.r_max;

  Section c(subtable(root, "constraints"), "constraints");
  c.boolean("forbid_overflow", cfg.constraints.forbid_overflow);
  c.boolean("forbid_underflow", cfg.constraints.forbid_underflow);
  c.boolean("enforce_bounds", cfg.constraints.enforce_bounds);
  c.finish();

  Section o(subtable(root, "output"), "output");
  if (auto v = o.string("dir")) cfg.output.dir = *v;
  cfg.output.dir = (base_dir / cfg.output.dir).lexically_normal();
  o.boolean("write_trace", cfg.output.write_trace);
  o.boolean("write_cold_store", cfg.output.write_cold_store);
  o.finish();

  if (const auto problems = cfg.problems(); !problems.empty()) {
    throw ConfigError(fmt::format("invalid config: {}", fmt::join(problems, "; ")));
  }
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  return parse_config(read_file(path), path.parent_path().empty() ? "." : path.parent_path());
}

}  // namespace evoplc::cli

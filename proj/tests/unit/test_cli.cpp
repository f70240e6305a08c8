#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <tuple>
#include <sstream>

#include <fmt/format.h>
#include <json.hpp>

#include "evoplc/errors.hpp"
#include "evoplc/genome_json.hpp"
#include "evoplc/runner.hpp"

using namespace evoplc;
using namespace evoplc::cli;
namespace fs = std::filesystem;

namespace {

const fs::path kSource = EVOPLC_SOURCE_DIR;

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void spit(const fs::path& p, const std::string& text) {
  fs::create_directories(p.parent_path());
  std::ofstream(p, std::ios::binary) << text;
}

// Fresh scratch directory per test case.
fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / "evoplc_test_cli" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::map<std::string, std::string> tree(const fs::path& root) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(root)) {
    if (e.is_regular_file()) out[fs::relative(e.path(), root).generic_string()] = slurp(e.path());
  }
  return out;
}

RunConfig quick(const std::string& mode, const fs::path& out, std::uint64_t seed = 1) {
  auto cfg = load_config(kSource / "configs" / (mode == "prior" ? "default.toml" : "progressive.toml"));
  cfg.evolution.generations = 4;
  cfg.evolution.population_size = 12;
  cfg.evolution.seed = seed;
  cfg.output.dir = out;
  return cfg;
}

// Drops comment-only lines, which carry run-specific provenance.
std::string body(const std::string& text) {
  std::istringstream in(text);
  std::string out, line;
  while (std::getline(in, line)) {
    if (line.rfind("(*", 0) != 0) out += line + "\n";
  }
  return out;
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string("\"") + EVOPLC_CLI_PATH + "\" " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

constexpr const char* kMinimal = R"(
[genome]
r_min = 1
r_max = 4
)";

}  // namespace

TEST_CASE("shipped configs load") {
  const auto prior = load_config(kSource / "configs" / "default.toml");
  CHECK(prior.problems().empty());
  CHECK(prior.evolution.mode == evolution::PaMode::Prior);
  CHECK(prior.evolution.population_size == 64);
  CHECK(prior.evolution.generations == 200);
  CHECK(prior.scenario.params.q1 == 0.08);
  CHECK(prior.fitness.p_trans == 9.2);
  CHECK(prior.output.dir == (kSource / "configs" / "../out/prior").lexically_normal());

  const auto prog = load_config(kSource / "configs" / "progressive.toml");
  CHECK(prog.evolution.mode == evolution::PaMode::Progressive);
  CHECK(prog.scenario == prior.scenario);

  const auto small = load_config(kSource / "configs" / "small.toml");
  CHECK(small.problems().empty());
  CHECK(space_size(small.evolution.bounds) <= kOracleSpaceLimit);
}

TEST_CASE("defaults fill omitted sections") {
  const auto cfg = parse_config(kMinimal);
  CHECK(cfg.scenario == plant::Scenario::automatic());
  CHECK(cfg.evolution.bounds.r_max == 4);
  // p_code defaults to r_max when r_max is small, p_trans to the pump target.
  CHECK(cfg.fitness.p_code == 4.0);
  CHECK(cfg.fitness.p_trans == doctest::Approx(evaluate::default_p_trans(cfg.scenario)));
  CHECK(parse_config("").fitness.p_code == 12.0);
}

TEST_CASE("invalid configs raise ConfigError") {
  for (const char* bad : {
           "[plant]\nq9 = 1.0\n",
           "[bogus]\n",
           "[plant]\nq1 = \"fast\"\n",
           "[plant]\nthresholds = [0.5, 0.25, 0.75]\n",
           "[plant]\ndt = 0.0\n",
           "[genome]\nr_min = 9\nr_max = 4\n",
           "[genome]\noperators = \"xor\"\n",
           "[evolution]\nmode = \"sideways\"\n",
           "[evolution]\nparents = 1\n",
           "[evolution]\nmutation_rate = 2.0\n",
           "[fitness]\nalpha = [1.0, 0.0, 1.0]\n",
           "[fitness]\nalpha = [1.0, 1.0]\n",
           "[fitness]\np_code = 40.0\n",
           "[scenario]\nduration = -1.0\n",
           "[scenario]\nfile = \"a.toml\"\n[[scenario.inputs]]\nt_start = 0.0\nB1 = true\nB2 = false\nB3 = false\n",
           "profile = 3\n",
           "[plant\n",
       }) {
    INFO(bad);
    CHECK_THROWS_AS(parse_config(bad), ConfigError);
  }
}

TEST_CASE("scenario files layer over the plant section") {
  const auto dir = scratch("scenario");
  spit(dir / "s.toml", "duration = 30.0\n[plant]\nq1 = 0.1\n[[inputs]]\nt_start = 0.0\nB1 = false\nB2 = true\nB3 = false\n");
  spit(dir / "run.toml", "[plant]\nq2 = 0.04\n[scenario]\nfile = \"s.toml\"\n");
  const auto cfg = load_config(dir / "run.toml");
  CHECK(cfg.scenario.duration == 30.0);
  CHECK(cfg.scenario.params.q1 == 0.1);
  CHECK(cfg.scenario.params.q2 == 0.04);
  REQUIRE(cfg.scenario.inputs.size() == 1);
  CHECK_FALSE(cfg.scenario.inputs[0].buttons[0]);

  const auto shipped = parse_scenario(slurp(kSource / "configs/scenarios/manual_switch.toml"), {});
  CHECK(shipped.inputs.size() == 2);
  CHECK(shipped.inputs[1].t_start == 60.0);

  spit(dir / "missing.toml", "[scenario]\nfile = \"nowhere.toml\"\n");
  CHECK_THROWS_AS(load_config(dir / "missing.toml"), IoError);
  CHECK_THROWS_AS(load_config(dir / "absent.toml"), IoError);
}

TEST_CASE("space size counts the enumerated space") {
  CHECK(space_size({1, 1, genome::OperatorSet::Paper}) == 96);
  for (const genome::GenomeBounds b : {genome::GenomeBounds{1, 1, genome::OperatorSet::Full},
                                       genome::GenomeBounds{1, 2, genome::OperatorSet::Paper},
                                       genome::GenomeBounds{1, 2, genome::OperatorSet::Full},
                                       genome::GenomeBounds{2, 3, genome::OperatorSet::Paper}}) {
    const auto all = enumerate_space(b);
    REQUIRE(all.size() == space_size(b));
    for (const auto& ind : all) REQUIRE(genome::validate(ind, b).empty());
    for (std::size_t i = 1; i < all.size(); ++i) REQUIRE(all[i].rows != all[i - 1].rows);
  }
  // Two rows: 96 single-row rungs squared minus shared keys, plus continuations.
  CHECK(space_size({2, 2, genome::OperatorSet::Paper}) == 96 * 84 + 96 * 12);
  CHECK_THROWS_AS(enumerate_space({4, 16, genome::OperatorSet::Full}), SpaceTooLarge);
}

TEST_CASE("oracle front is the exact feasible front") {
  evaluate::EvaluationSetup s;
  s.bounds = {1, 2, genome::OperatorSet::Paper};
  s.fitness.p_code = 2.0;
  const evaluate::Evaluator ev(s);
  const auto r = enumerate_oracle(ev, 2);
  REQUIRE(r.evaluations.size() == r.individuals.size());
  std::vector<evaluate::ObjectiveVector> feasible;
  for (const auto& e : r.evaluations) {
    if (e.feasible) feasible.push_back(e.objectives);
  }
  std::set<std::tuple<double, double, double>> want, got;
  for (auto i : evaluate::pareto_front_indices(feasible)) want.insert({feasible[i].f1, feasible[i].f2, feasible[i].f3});
  for (auto i : r.front) {
    REQUIRE(r.evaluations[i].feasible);
    got.insert({r.evaluations[i].objectives.f1, r.evaluations[i].objectives.f2, r.evaluations[i].objectives.f3});
  }
  CHECK(got == want);
}

TEST_CASE("prior run writes the artifact set") {
  const auto dir = scratch("prior");
  const auto report = run(quick("prior", dir));
  for (const char* f : {"history.csv", "objectives.csv", "front.json", "cold_store.csv", "program.st", "program.il",
                        "summary.txt", "genome.json", "trace.csv", "report.json"}) {
    INFO(f);
    CHECK(fs::exists(dir / f));
  }
  CHECK_FALSE(fs::exists(dir / "FAILED"));
  CHECK(std::is_sorted(report.files.begin(), report.files.end()));

  const auto front = nlohmann::json::parse(slurp(dir / "front.json"));
  CHECK(front["schema_version"] == kArtifactSchemaVersion);
  CHECK(front["mode"] == "prior");
  std::vector<evaluate::ObjectiveVector> pts;
  for (const auto& m : front["members"]) {
    CHECK(m["feasible"] == true);
    const auto g = genome::from_json_text(m["genome"].dump());
    CHECK(genome::validate(g).empty());
    pts.push_back({m["objectives"]["f1"], m["objectives"]["f2"], m["objectives"]["f3"]});
  }
  for (const auto& a : pts) {
    for (const auto& b : pts) CHECK_FALSE(evaluate::dominates(a, b));
  }

  const auto manifest = nlohmann::json::parse(slurp(dir / "report.json"));
  CHECK(manifest["schema_version"] == kArtifactSchemaVersion);
  CHECK(manifest["files"].size() == report.files.size());
  CHECK(slurp(dir / "objectives.csv").rfind("id,f1,f2,f3,fitness,feasible,front_member\n", 0) == 0);
  CHECK(slurp(dir / "program.st").find("(* seed: 1 *)") != std::string::npos);

  // The emitted genome decodes to the same program.
  const auto emitted = decode_file(dir / "genome.json", dir / "decoded");
  CHECK(emitted.size() == 3);
  CHECK(body(slurp(dir / "decoded" / "program.st")) == body(slurp(dir / "program.st")));
  CHECK(body(slurp(dir / "decoded" / "program.il")) == body(slurp(dir / "program.il")));
}

TEST_CASE("progressive run emits every front member") {
  const auto dir = scratch("progressive");
  const auto report = run(quick("progressive", dir));
  REQUIRE_FALSE(report.front.empty());
  REQUIRE(report.best_id);
  for (const auto& m : report.front) {
    CHECK(fs::exists(dir / "front" / fmt::format("member_{}", m.individual.id) / "program.st"));
  }
  const auto knee = knee_point(report.front);
  REQUIRE(knee);
  CHECK(knee->individual.id == *report.best_id);
  for (const auto& m : report.front) CHECK(m.fitness.value_or(0.0) <= knee->fitness.value_or(0.0));
}

TEST_CASE("runs are reproducible byte for byte") {
  for (const std::string mode : {"prior", "progressive"}) {
    const auto a = scratch(mode + "_a");
    const auto b = scratch(mode + "_b");
    run(quick(mode, a, 7));
    auto cfg = quick(mode, b, 7);
    cfg.evolution.jobs = 2;
    run(cfg);
    auto ta = tree(a);
    auto tb = tree(b);
    ta.erase("report.json");
    tb.erase("report.json");
    CHECK(ta == tb);
  }
}

TEST_CASE("a failed run leaves a FAILED marker and no report") {
  const auto dir = scratch("failed");
  auto cfg = quick("prior", dir);
  cfg.fitness.clamp_negative = false;
  cfg.fitness.alpha = {1.0, 0.0002, 0.5};
  cfg.fitness.p_trans = 0.01;
  CHECK_THROWS_AS(run(cfg), NumericalError);
  CHECK(fs::exists(dir / "FAILED"));
  CHECK_FALSE(fs::exists(dir / "report.json"));

  // A later successful run clears the marker.
  run(quick("prior", dir));
  CHECK_FALSE(fs::exists(dir / "FAILED"));
  CHECK(fs::exists(dir / "report.json"));
}

TEST_CASE("compare runs both modes on the same seeds") {
  const auto dir = scratch("compare");
  const std::vector<std::uint64_t> seeds{1, 2};
  const auto report = compare(quick("prior", dir), quick("progressive", dir), seeds, dir);
  CHECK(report.prior_rows > 0);
  CHECK(report.progressive_rows > 0);
  CHECK(report.progressive_covers_prior >= 0.0);
  CHECK(report.progressive_covers_prior <= 1.0);
  CHECK(report.prior_covers_progressive >= 0.0);
  CHECK(report.prior_covers_progressive <= 1.0);
  const auto csv = slurp(dir / "comparison.csv");
  CHECK(csv.rfind("mode,seed,id,f1,f2,f3,fitness,feasible\n", 0) == 0);
  CHECK(static_cast<std::size_t>(std::count(csv.begin(), csv.end(), '\n')) ==
        1 + report.prior_rows + report.progressive_rows);
  CHECK(nlohmann::json::parse(slurp(dir / "comparison.json")).contains("progressive_covers_prior"));

  auto other = quick("progressive", dir);
  other.scenario.params.q1 = 0.09;
  CHECK_THROWS_AS(compare(quick("prior", dir), other, seeds, dir), ConfigError);
}

TEST_CASE("coverage") {
  const std::vector<evaluate::ObjectiveVector> a{{2, 1, 2}};
  const std::vector<evaluate::ObjectiveVector> b{{1, 2, 1}, {3, 0, 0}};
  CHECK(coverage(a, b) == 0.5);
  CHECK(coverage(b, a) == 0.0);
  CHECK(coverage(a, {}) == 0.0);
}

TEST_CASE("decode of the reference table") {
  const auto dir = scratch("decode");
  decode_file(kSource / "tests/golden/reference.genome.json", dir);
  const auto st = slurp(dir / "program.st");
  CHECK(st.find("(* source: reference.genome.json *)") != std::string::npos);
  CHECK(st.find("P1 := NOT S3 AND B1;") != std::string::npos);
  spit(dir / "broken.json", "[{\"line\":0,\"output\":null,\"input\":\"S1\",\"op\":\"AND\",\"neg\":false,\"mode\":\"A\"}]");
  CHECK_THROWS(decode_file(dir / "broken.json", dir / "x"));
}

TEST_CASE("command line exit codes") {
  const auto dir = scratch("exit");
  CHECK(run_cli("") == kExitUsage);
  CHECK(run_cli("run") == kExitUsage);
  CHECK(run_cli("run " + (dir / "absent.toml").string()) == kExitUsage);

  spit(dir / "bad.toml", "[plant]\nq1 = \"x\"\n");
  CHECK(run_cli("run " + (dir / "bad.toml").string()) == kExitConfig);

  spit(dir / "io.toml", "[scenario]\nfile = \"nowhere.toml\"\n");
  CHECK(run_cli("run " + (dir / "io.toml").string()) == kExitIo);

  spit(dir / "num.toml",
       "[evolution]\npopulation = 8\ngenerations = 1\n[fitness]\nalpha = [1.0, 0.0002, 0.5]\np_trans = 0.01\n"
       "clamp_negative = false\n[output]\ndir = \"num_out\"\n");
  CHECK(run_cli("run " + (dir / "num.toml").string()) == kExitEvolution);
  CHECK(fs::exists(dir / "num_out" / "FAILED"));

  spit(dir / "ok.toml", "[evolution]\npopulation = 8\ngenerations = 1\n[output]\ndir = \"ok_out\"\n");
  CHECK(run_cli("run " + (dir / "ok.toml").string() + " --seed 3") == kExitOk);
  CHECK(slurp(dir / "ok_out" / "report.json").find("\"seed\": 3") != std::string::npos);

  CHECK(run_cli("decode " + (kSource / "tests/golden/reference.genome.json").string() + " --out-dir " +
                (dir / "dec").string()) == kExitOk);
  CHECK(body(slurp(dir / "dec" / "program.il")) == body(slurp(kSource / "tests/golden/reference.il")));
  CHECK(body(slurp(dir / "dec" / "program.st")) == body(slurp(kSource / "tests/golden/reference.st")));
}

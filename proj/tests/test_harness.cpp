#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "viewpair/errors.hpp"
#include "viewpair/harness.hpp"

using namespace viewpair;
namespace fs = std::filesystem;

namespace {

BenchConfig small_config() {
  BenchConfig c;
  c.grid = GridSpec{6, 3};
  c.world.num_classes = 3;
  c.world.feature_dim = 3;
  c.world.noise_sigma = 1.0;
  c.world.train_objects_per_class = 2;
  c.world.test_objects_per_class = 2;
  c.lengths = {1, 3};
  c.ablation_length = 3;
  c.seeds = {1, 2};
  c.training = {12, 6, 2};
  c.horizon_cap = 3;
  return c;
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace

TEST_CASE("default configuration is valid and round trips through json") {
  const BenchConfig d;
  CHECK_NOTHROW(d.validate());
  CHECK(d.lengths == std::vector<int>{3, 6, 12});
  CHECK(d.strategies.size() == 5);
  const std::string text = config_to_json_text(d);
  CHECK(config_to_json_text(config_from_json_text(text)) == text);
  const std::string small = config_to_json_text(small_config());
  CHECK(config_to_json_text(config_from_json_text(small)) == small);
}

TEST_CASE("configuration errors") {
  CHECK_THROWS_AS(config_from_json_text("{"), ConfigError);
  CHECK_THROWS_AS(config_from_json_text(R"({"lenghts": [3]})"), ConfigError);
  CHECK_THROWS_AS(config_from_json_text(R"({"world": {"noise": 1}})"), ConfigError);
  CHECK_THROWS_AS(config_from_json_text(R"({"lengths": []})"), ConfigError);
  CHECK_THROWS_AS(config_from_json_text(R"({"lengths": [0]})"), ConfigError);
  CHECK_THROWS_AS(config_from_json_text(R"({"lengths": [61]})"), ConfigError);
  CHECK_THROWS_AS(config_from_json_text(R"({"seeds": []})"), ConfigError);
  CHECK_THROWS_AS(config_from_json_text(R"({"strategies": []})"), ConfigError);
  CHECK_THROWS_AS(config_from_json_text(R"({"strategies": ["teleport"]})"), ConfigError);
  CHECK_THROWS_AS(config_from_json_text(R"({"methods": ["majority"]})"), ConfigError);
  CHECK_THROWS_AS(config_from_json_text(R"({"world": {"noise_sigma": -0.1}})"), ConfigError);
  CHECK_THROWS_AS(config_from_json_text(R"({"world": {"num_classes": 1}})"), ConfigError);
  CHECK_THROWS_AS(config_from_json_text(R"({"grid": {"azimuth_steps": 2}})"), ConfigError);
  CHECK_THROWS_AS(config_from_json_text(R"({"beta": "high"})"), ConfigError);
  CHECK_THROWS_AS(config_from_json_text(R"({"world": {"ambiguity": {"kind": "table", "values": [0.1]}}})"),
                  ConfigError);
  CHECK_THROWS_AS(config_from_json_text(R"({"world": {"ambiguity": {"kind": "spiky"}}})"), ConfigError);
  CHECK_THROWS_AS(load_config("/nonexistent/config.json"), ConfigError);

  const auto c = config_from_json_text(R"({"lengths": [2, 4], "methods": ["best-unweighted", "vote"],
                                           "strategies": ["optimised"], "seeds": [9]})");
  CHECK(c.lengths == std::vector<int>{2, 4});
  CHECK(c.methods.size() == 2);
  CHECK(c.methods[0].name() == "best-unweighted");
  CHECK(c.methods[1].is_vote());
  CHECK(c.strategies == std::vector<Strategy>{Strategy::Optimised});
  CHECK(c.seeds == std::vector<std::uint64_t>{9});

  // Bad configurations are rejected before any work.
  BenchConfig bad = small_config();
  bad.lengths = {};
  CHECK_THROWS_AS(run_benchmark(bad), ConfigError);
}

TEST_CASE("ambiguity profiles") {
  const GridSpec g{};
  AmbiguityProfile p;
  const auto h = ambiguity_values(p, g, 3);
  CHECK(h.size() == 60);
  CHECK(h == ambiguity_values(p, g, 3));
  for (double a : h) CHECK((a >= 0.0 && a <= 1.0));
  p.kind = "constant";
  p.value = 0.25;
  CHECK(ambiguity_values(p, g, 3) == std::vector<double>(60, 0.25));
}

TEST_CASE("results csv round trip and empty table") {
  CHECK(results_csv(ResultsTable{}) == "strategy,method,length,seed,correct,total,accuracy\n");
  CHECK(summary_csv(ResultsTable{}) == "strategy,method,length,seeds,mean_accuracy,std_accuracy\n");
  ResultsTable t;
  t.add({"random", "all-weighted", 3, 1}, {7, 9});
  t.add({"random", "all-weighted", 3, 2}, {8, 9});
  t.add({"optimised", "vote", 12, 1}, {1, 3});
  const std::string csv = results_csv(t);
  CHECK(results_csv(parse_results_csv(csv)) == csv);
  CHECK(csv.find("random,all-weighted,3,1,7,9,0.777778\n") != std::string::npos);
  CHECK(t.mean_accuracy("random", "all-weighted", 3) == doctest::Approx(15.0 / 18));
  const auto rows = t.summarize();
  REQUIRE(rows.size() == 2);
  CHECK(rows[1].std_dev == doctest::Approx(std::sqrt(2 * std::pow(1.0 / 18, 2))));
  CHECK_THROWS_AS(t.at({"random", "vote", 3, 1}), LookupError);
  CHECK_THROWS_AS(parse_results_csv("strategy,method\n"), ParseError);
  CHECK_THROWS_AS(parse_results_csv("strategy,method,length,seed,correct,total,accuracy\nx,y,1,1,5,4,1\n"),
                  ParseError);

  const auto path = fs::temp_directory_path() / "viewpair_test_results.md";
  emit_results(t, OutputFormat::Markdown, path, "T");
  const std::string md = read_text(path);
  CHECK(md.find("### T") == 0);
  CHECK(md.find("| all-weighted | random | 83.3 ± 7.9 | - | 83.3 |") != std::string::npos);
  fs::remove(path);
}

TEST_CASE("benchmark covers every configured cell and is deterministic") {
  BenchConfig c = small_config();
  c.strategies = {Strategy::Random, Strategy::NbvGlobal, Strategy::Optimised};
  const auto a = run_benchmark(c);
  CHECK(a.cells().size() == 2 * 3 * 2 * 2);
  for (const auto& [key, tally] : a.cells()) CHECK(tally.total == 6u * 18u);
  CHECK(results_csv(run_benchmark(c)) == results_csv(a));
  c.jobs = 3;
  CHECK(results_csv(run_benchmark(c)) == results_csv(a));
}

TEST_CASE("single view protocol accuracy") {
  BenchConfig c = small_config();
  c.world.num_classes = 2;
  c.world.test_objects_per_class = 1;
  c.lengths = {1};
  c.seeds = {4};
  c.strategies = {Strategy::Random};
  c.methods = {Method{FusionVariant{}}};
  const auto table = run_benchmark(c);

  const Experiment exp(c, 4);
  std::size_t correct = 0, total = 0;
  for (const ObjectRef& obj : exp.test_objects()) {
    for (const ViewIndex& v : all_views(c.grid)) {
      const auto seeds = exp.episode_seeds(obj, v, Strategy::Random);
      const auto obs = episode_observation(exp.oracle(), obj, v, seeds.observation);
      correct += exp.oracle().single_posterior(obs).argmax() == obj.label;
      ++total;
    }
  }
  const Tally& t = table.at({"random", "all-weighted", 1, 4});
  CHECK(t.correct == correct);
  CHECK(t.total == total);
}

TEST_CASE("degenerate worlds") {
  BenchConfig c = small_config();
  c.world.noise_sigma = 0.0;
  c.world.ambiguity.kind = "constant";
  c.world.ambiguity.value = 0.0;
  c.lengths = {1, 2, 4};
  for (const ResultsTable& table : {run_benchmark(c), ablation_table(c), accuracy_curve(c)}) {
    CHECK_FALSE(table.empty());
    for (const auto& [key, tally] : table.cells()) CHECK(tally.accuracy() == 1.0);
  }

  c.world.noise_sigma = 1.0;
  c.world.ambiguity.value = 1.0;
  c.world.num_classes = 4;
  c.world.test_objects_per_class = 3;
  c.lengths = {3};
  c.strategies = {Strategy::Random};
  c.methods = {Method{FusionVariant{}}};
  const auto flat = run_benchmark(c);
  for (const auto& [key, tally] : flat.cells()) {
    // Every posterior is uniform, so the tie-break always says class 0.
    CHECK(tally.accuracy() == doctest::Approx(0.25));
  }
}

TEST_CASE("accuracy curve has one point per prefix") {
  BenchConfig c = small_config();
  c.strategies = {Strategy::Straight};
  c.lengths = {4};
  c.seeds = {3};
  const auto curve = accuracy_curve(c);
  CHECK(curve.cells().size() == 4 * 2);
  for (int m = 1; m <= 4; ++m) CHECK(curve.at({"straight", "vote", m, 3}).total == 6u * 18u);
}

TEST_CASE("score table ingestion drives the benchmark") {
  BenchConfig c = small_config();
  const auto world = gen_world(world_params(c, 1));
  std::vector<ObjectRef> train, test;
  synthetic_objects(c.world, train, test);
  std::vector<ObjectRef> all = train;
  all.insert(all.end(), test.begin(), test.end());
  const ScoreTable table = make_score_table(world, all, 1);
  CHECK(table.num_objects() == 12);
  CHECK(table.object_id(0) == "obj00000");

  const auto path = fs::temp_directory_path() / "viewpair_test_bench_scores.csv";
  save_score_table(table, path);
  const ScoreTable loaded = load_score_table(path, c.grid);
  fs::remove(path);
  CHECK(loaded == table);

  c.strategies = {Strategy::Random, Strategy::NbvAdjacent, Strategy::Optimised};
  const auto results = run_benchmark(c, &loaded);
  for (const auto& [key, tally] : results.cells()) {
    CHECK(tally.total == 6u * 18u);
    CHECK(tally.accuracy() > 1.0 / 3.0);
  }
  CHECK(results_csv(run_benchmark(c, &loaded)) == results_csv(results));

  BenchConfig other = c;
  other.grid = GridSpec{12, 5};
  other.lengths = {3};
  CHECK_THROWS_AS(run_benchmark(other, &loaded), ConfigError);
}

TEST_CASE("small configuration matches the golden summary") {
  BenchConfig c = small_config();
  const std::string produced = summary_csv(run_benchmark(c));
  const fs::path golden = fs::path(VIEWPAIR_SOURCE_DIR) / "tests/golden/small_summary.csv";
  REQUIRE_MESSAGE(fs::exists(golden), "missing golden file " << golden.string());
  CHECK(produced == read_text(golden));
}

// viewpair: command-line front end for the multi-view recognition benchmark.
//
// Exit codes: 0 success, 1 configuration error, 2 data error, 3 golden-file
// mismatch.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "viewpair/csv.hpp"
#include "viewpair/errors.hpp"
#include "viewpair/harness.hpp"

namespace fs = std::filesystem;
using namespace viewpair;

namespace {

constexpr int kExitConfig = 1;
constexpr int kExitData = 2;
constexpr int kExitGolden = 3;

struct Overrides {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<std::string> scores;
  std::optional<std::string> strategies;
  std::optional<std::string> lengths;
  std::optional<int> jobs;
  std::string golden;
};

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  for (std::string_view f : csv::split(text))
    if (!f.empty()) out.emplace_back(f);
  return out;
}

BenchConfig resolve_config(const Overrides& o) {
  BenchConfig c = o.config.empty() ? BenchConfig{} : load_config(o.config);
  if (o.seed) c.seeds = {*o.seed};
  if (o.out) c.out_dir = *o.out;
  if (o.scores) c.scores_path = *o.scores;
  if (o.jobs) c.jobs = *o.jobs;
  if (o.strategies) {
    c.strategies.clear();
    for (const std::string& s : split_list(*o.strategies)) {
      const auto parsed = parse_strategy(s);
      if (!parsed) throw ConfigError("unknown strategy '" + s + "'");
      c.strategies.push_back(*parsed);
    }
  }
  if (o.lengths) {
    c.lengths.clear();
    for (const std::string& s : split_list(*o.lengths)) {
      try {
        c.lengths.push_back(std::stoi(s));
      } catch (const std::exception&) {
        throw ConfigError("bad sequence length '" + s + "'");
      }
    }
  }
  c.validate();
  return c;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
  out << text;
}

std::optional<ScoreTable> maybe_load_scores(const BenchConfig& c) {
  if (!c.scores_path) return std::nullopt;
  return load_score_table(*c.scores_path, c.grid);
}

fs::path prepare_out(const BenchConfig& c) {
  fs::path dir(c.out_dir);
  fs::create_directories(dir);
  write_text(dir / "config.json", config_to_json_text(c));
  return dir;
}

void write_tables(const ResultsTable& table, const fs::path& dir, const std::string& stem,
                  const std::string& title) {
  emit_results(table, OutputFormat::Csv, dir / (stem + ".csv"));
  write_text(dir / (stem + "_summary.csv"), summary_csv(table));
  emit_results(table, OutputFormat::Markdown, dir / (stem + ".md"), title);
  std::cout << summary_markdown(table, title);
}

int cmd_gen_world(const BenchConfig& c) {
  const fs::path dir = prepare_out(c);
  const std::uint64_t seed = c.seeds.front();
  const SyntheticWorld world = gen_world(world_params(c, seed));
  std::ostringstream sig;
  sig << "class,azimuth,elevation,ambiguity";
  for (int j = 0; j < world.feature_dim(); ++j) sig << ",f" << j;
  sig << '\n';
  for (Label k = 0; k < world.num_classes(); ++k) {
    for (const ViewIndex& v : all_views(world.grid())) {
      sig << k << ',' << v.azimuth << ',' << v.elevation << ','
          << csv::format_exact(world.ambiguity(v));
      for (double x : world.signature(k, v)) sig << ',' << csv::format_exact(x);
      sig << '\n';
    }
  }
  write_text(dir / "world_signatures.csv", sig.str());

  std::vector<ObjectRef> train, test;
  synthetic_objects(c.world, train, test);
  std::vector<ObjectRef> all = train;
  all.insert(all.end(), test.begin(), test.end());
  if (world.noise_sigma() > 0.0) {
    save_score_table(make_score_table(world, all, seed), dir / "scores.csv");
    std::cout << "wrote " << (dir / "world_signatures.csv").string() << " and "
              << (dir / "scores.csv").string() << "\n";
  } else {
    std::cout << "wrote " << (dir / "world_signatures.csv").string()
              << " (no score table for a noise-free world)\n";
  }
  return 0;
}

int cmd_learn_weights(const BenchConfig& c) {
  const fs::path dir = prepare_out(c);
  const auto table = maybe_load_scores(c);
  const Experiment exp(c, c.seeds.front(), table ? &*table : nullptr);
  save_weight_table(exp.weights(), dir / "weights.csv");
  std::cout << "wrote " << (dir / "weights.csv").string() << " ("
            << exp.weights().entries().size() << " poses)\n";
  return 0;
}

int cmd_fit_policies(const BenchConfig& c) {
  const fs::path dir = prepare_out(c);
  const auto table = maybe_load_scores(c);
  const Experiment exp(c, c.seeds.front(), table ? &*table : nullptr);
  save_nbv_policy(exp.nbv(), dir / "nbv_policy.csv");
  save_quality_predictor(exp.quality(), dir / "quality_predictor.csv");
  std::cout << "wrote " << (dir / "nbv_policy.csv").string() << " and "
            << (dir / "quality_predictor.csv").string() << "\n";
  return 0;
}

int cmd_bench(const BenchConfig& c) {
  const fs::path dir = prepare_out(c);
  const auto table = maybe_load_scores(c);
  write_tables(run_benchmark(c, table ? &*table : nullptr), dir, "results",
               "Recognition accuracy (%)");
  return 0;
}

int cmd_ablation(const BenchConfig& c) {
  const fs::path dir = prepare_out(c);
  const auto table = maybe_load_scores(c);
  write_tables(ablation_table(c, table ? &*table : nullptr), dir, "ablation",
               "Fusion ablation on random trajectories (%)");
  return 0;
}

int cmd_curve(const BenchConfig& c) {
  const fs::path dir = prepare_out(c);
  const auto table = maybe_load_scores(c);
  write_tables(accuracy_curve(c, table ? &*table : nullptr), dir, "curve",
               "Accuracy by sequence length (%)");
  return 0;
}

int cmd_check_golden(const BenchConfig& c, const std::string& golden_path) {
  std::ifstream in(golden_path, std::ios::binary);
  if (!in) throw ParseError("cannot read golden file '" + golden_path + "'");
  std::stringstream golden;
  golden << in.rdbuf();
  const auto table = maybe_load_scores(c);
  const std::string produced = summary_csv(run_benchmark(c, table ? &*table : nullptr));
  if (produced == golden.str()) {
    std::cout << "golden match: " << golden_path << "\n";
    return 0;
  }
  const fs::path dir = prepare_out(c);
  write_text(dir / "golden_candidate.csv", produced);
  std::cerr << "golden mismatch: " << golden_path << " (candidate written to "
            << (dir / "golden_candidate.csv").string() << ")\n";
  return kExitGolden;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Pairwise multi-view recognition and active view selection benchmark"};
  app.require_subcommand(1);
  Overrides o;

  const auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", o.config, "JSON benchmark configuration");
    sub->add_option("--seed", o.seed, "Run a single seed instead of the configured list");
    sub->add_option("--out", o.out, "Output directory");
    sub->add_option("--scores", o.scores, "Use an ingested score table as the classifier");
    sub->add_option("--strategies", o.strategies, "Comma-separated strategy names");
    sub->add_option("--lengths", o.lengths, "Comma-separated sequence lengths");
    sub->add_option("--jobs", o.jobs, "Worker threads");
  };

  std::map<std::string, std::function<int(const BenchConfig&)>> commands{
      {"gen-world", cmd_gen_world},   {"learn-weights", cmd_learn_weights},
      {"fit-policies", cmd_fit_policies}, {"bench", cmd_bench},
      {"ablation", cmd_ablation},     {"curve", cmd_curve},
  };
  std::map<std::string, std::string> help{
      {"gen-world", "Generate a synthetic world and a sampled score table"},
      {"learn-weights", "Learn the per-pose fusion weights"},
      {"fit-policies", "Fit the next-best-view policy and the quality predictor"},
      {"bench", "Run the benchmark over strategies and sequence lengths"},
      {"ablation", "Compare the four fusion variants on random trajectories"},
      {"curve", "Accuracy at every sequence length"},
  };
  for (const auto& [name, _] : commands) add_common(app.add_subcommand(name, help[name]));
  CLI::App* golden = app.add_subcommand("check-golden", "Compare benchmark summary to a golden file");
  add_common(golden);
  golden->add_option("--golden", o.golden, "Golden summary CSV")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    const BenchConfig config = resolve_config(o);
    if (golden->parsed()) return cmd_check_golden(config, o.golden);
    for (const auto& [name, fn] : commands)
      if (app.got_subcommand(name)) return fn(config);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  }
  return 0;
}

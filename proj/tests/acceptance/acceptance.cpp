// Acceptance suite: one PASS/FAIL line per criterion, then the golden-file
// comparison of the default benchmark summary. Exit status is non-zero when
// any line fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>

#include "viewpair/harness.hpp"
#include "oracles.hpp"

using namespace viewpair;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

int failures = 0;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

void report(int id, const std::string& name, bool ok, const std::string& detail, double secs) {
  char buf[64];
  std::snprintf(buf, sizeof buf, " (%.1f s)", secs);
  std::cout << (ok ? "PASS " : "FAIL ") << id << " " << name << ": " << detail << buf << std::endl;
  if (!ok) ++failures;
}

// Runs `body`, which fills `detail` and returns pass/fail. Exceptions fail.
void criterion(int id, const std::string& name, const std::function<bool(std::string&)>& body) {
  const auto t0 = Clock::now();
  std::string detail;
  bool ok = false;
  try {
    ok = body(detail);
  } catch (const std::exception& e) {
    detail += std::string(" exception: ") + e.what();
  }
  report(id, name, ok, detail, seconds_since(t0));
}

std::string pct(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f%%", 100.0 * x);
  return buf;
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

std::vector<ObjectRef> all_objects(const BenchConfig& c) {
  std::vector<ObjectRef> train, test;
  synthetic_objects(c.world, train, test);
  train.insert(train.end(), test.begin(), test.end());
  return train;
}

}  // namespace

int main() {
  const BenchConfig defaults;
  const GridSpec grid = defaults.grid;

  criterion(1, "combinatorics", [&](std::string& d) {
    const auto t0 = Clock::now();
    bool ok = true;
    for (std::size_t m = 1; m <= 20; ++m) ok = ok && enumerate_pairs(m).size() == m * (m - 1) / 2;
    const double secs = seconds_since(t0);
    d = "pair counts for M=1..20 " + std::string(ok ? "exact" : "wrong");
    return ok && secs < 1.0;
  });

  criterion(2, "oracle correctness", [&](std::string& d) {
    const auto t0 = Clock::now();
    double worst = 0.0;
    for (std::uint64_t i = 0; i < 1000; ++i) {
      Rng rng = make_rng(i, {0xacce});
      WorldParams p;
      p.seed = i;
      p.num_classes = 2 + static_cast<int>(i % 9);
      p.feature_dim = 1 + static_cast<int>(i % 8);
      p.noise_sigma = std::uniform_real_distribution<double>(0.6, 2.0)(rng);
      p.ambiguity.resize(static_cast<std::size_t>(grid.size()));
      for (double& a : p.ambiguity) a = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
      const auto w = gen_world(p);
      std::uniform_int_distribution<int> view(0, grid.size() - 1);
      const Label truth = std::uniform_int_distribution<int>(0, p.num_classes - 1)(rng);
      const auto a = observe(w, truth, grid.view_at(view(rng)), rng);
      const auto b = observe(w, truth, grid.view_at(view(rng)), rng);
      const auto single = single_posterior(w, a);
      const auto pair = pair_posterior(w, ViewPair::make(grid, a, b));
      const auto single_ref = oracle::gaussian_posterior(w, {a});
      const auto pair_ref = oracle::gaussian_posterior(w, {a, b});
      for (std::size_t k = 0; k < single_ref.size(); ++k) {
        worst = std::max(worst, std::abs(single.probs[k] - single_ref[k]));
        worst = std::max(worst, std::abs(pair.probs[k] - pair_ref[k]));
      }
    }
    char buf[96];
    std::snprintf(buf, sizeof buf, "1000 cases, max abs error %.3g (tol 1e-9)", worst);
    d = buf;
    return worst <= 1e-9 && seconds_since(t0) < 10.0;
  });

  criterion(3, "fusion ablation ordering", [&](std::string& d) {
    const auto table = ablation_table(defaults);
    const int m = defaults.ablation_length;
    const double aw = table.mean_accuracy("random", "all-weighted", m);
    const double au = table.mean_accuracy("random", "all-unweighted", m);
    const double bw = table.mean_accuracy("random", "best-weighted", m);
    const double bu = table.mean_accuracy("random", "best-unweighted", m);
    d = "all-weighted " + pct(aw) + ", all-unweighted " + pct(au) + ", best-weighted " + pct(bw) +
        ", best-unweighted " + pct(bu) + " over " + std::to_string(defaults.seeds.size()) + " seeds";
    return aw >= au && aw >= bu && aw - bu >= 0.0;
  });

  criterion(4, "accuracy non-decreasing in length", [&](std::string& d) {
    const auto curve = accuracy_curve(defaults);
    const int longest = *std::max_element(defaults.lengths.begin(), defaults.lengths.end());
    double worst = 1.0;
    std::string where = "none";
    for (Strategy s : defaults.strategies) {
      for (const Method& method : defaults.methods) {
        for (int len = 2; len <= longest; ++len) {
          const double step = curve.mean_accuracy(to_string(s), method.name(), len) -
                              curve.mean_accuracy(to_string(s), method.name(), len - 1);
          if (step < worst) {
            worst = step;
            where = to_string(s) + "/" + method.name() + " " + std::to_string(len - 1) + "->" +
                    std::to_string(len);
          }
        }
      }
    }
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.3f pp", 100.0 * worst);
    d = "smallest step " + std::string(buf) + " at " + where + " (tol -0.5 pp)";
    return worst >= -0.005;
  });

  std::string golden_summary;
  criterion(5, "view selection ordering", [&](std::string& d) {
    const auto bench = run_benchmark(defaults);
    golden_summary = summary_csv(bench);
    bool ok = true;
    for (const Method& method : defaults.methods) {
      for (int len : defaults.lengths) {
        const auto acc = [&](Strategy s) { return bench.mean_accuracy(to_string(s), method.name(), len); };
        const double g = acc(Strategy::NbvGlobal), a = acc(Strategy::NbvAdjacent);
        const double o = acc(Strategy::Optimised), r = acc(Strategy::Random);
        ok = ok && g >= a && o >= r;
        d += method.name() + "@" + std::to_string(len) + " global " + pct(g) + " adjacent " + pct(a) +
             " optimised " + pct(o) + " random " + pct(r) + "; ";
      }
    }
    return ok;
  });

  criterion(6, "planner equals brute force", [&](std::string& d) {
    Rng rng(606);
    std::uniform_int_distribution<int> visits(1, 40);
    std::uniform_int_distribution<int> remaining(1, 6);
    int checked = 0, agree = 0;
    while (checked < 250) {
      const auto state = oracle::random_state(grid, rng, visits(rng));
      if (state.num_unvisited() == 0) continue;
      const int r = remaining(rng);
      const auto fast = optimised_next(state, r, kDefaultPlannerHorizon);
      const auto slow = oracle::brute_force_next(state, r, kDefaultPlannerHorizon);
      ++checked;
      agree += fast && slow && fast->view == *slow;
    }
    d = std::to_string(agree) + "/" + std::to_string(checked) + " states agree, search depth up to 5";
    return agree == checked;
  });

  criterion(7, "incremental g equals recomputation", [&](std::string& d) {
    const Experiment exp(defaults, 7);
    const Models models = exp.models();
    EpisodeOptions opt;
    opt.strategy = Strategy::Optimised;
    opt.views = 12;
    double worst = 0.0;
    int episodes = 0, steps = 0;
    for (const ObjectRef& obj : exp.test_objects()) {
      if (episodes == 120) break;
      const ViewIndex start = grid.view_at(static_cast<int>((obj.id * 13) % static_cast<std::size_t>(grid.size())));
      const auto seeds = exp.episode_seeds(obj, start, opt.strategy);
      const auto r = run_episode(models, obj, start, opt, seeds, true);
      for (std::size_t s = 0; s < r.states.size(); ++s) {
        // From scratch: predicted qualities of every visited view so far.
        std::vector<double> g(static_cast<std::size_t>(grid.size()), 0.0);
        for (std::size_t i = 0; i <= s; ++i) {
          const auto h = exp.quality().predict(episode_observation(exp.oracle(), obj, r.path[i], seeds.observation));
          for (std::size_t u = 0; u < g.size(); ++u) g[u] += std::exp(-h[u]);
        }
        for (std::size_t i = 0; i <= s; ++i) g[static_cast<std::size_t>(grid.linear(r.path[i]))] = 0.0;
        for (std::size_t u = 0; u < g.size(); ++u) worst = std::max(worst, std::abs(g[u] - r.states[s].g_table()[u]));
        ++steps;
      }
      ++episodes;
    }
    char buf[128];
    std::snprintf(buf, sizeof buf, "%d episodes, %d steps, max abs difference %.3g (tol 1e-12)", episodes,
                  steps, worst);
    d = buf;
    return episodes >= 100 && worst <= 1e-12;
  });

  criterion(8, "determinism and persistence", [&](std::string& d) {
    BenchConfig c = defaults;
    c.seeds = {8};
    c.lengths = {3};
    const std::string first = results_csv(run_benchmark(c));
    const std::string second = results_csv(run_benchmark(c));
    const bool same = first == second;

    const fs::path dir = fs::temp_directory_path() / "viewpair_acceptance";
    fs::create_directories(dir);
    const auto world = gen_world(world_params(defaults, 8));
    const ScoreTable table = make_score_table(world, all_objects(defaults), 8);
    save_score_table(table, dir / "scores.csv");
    const bool scores_ok = load_score_table(dir / "scores.csv", grid) == table;
    const Experiment exp(c, 8);
    save_weight_table(exp.weights(), dir / "weights.csv");
    const bool weights_ok = load_weight_table(dir / "weights.csv") == exp.weights();
    fs::remove_all(dir);
    d = std::string("bench repeat ") + (same ? "byte-identical" : "differs") + ", score table " +
        (scores_ok ? "bit-exact" : "differs") + ", weight table " + (weights_ok ? "bit-exact" : "differs");
    return same && scores_ok && weights_ok;
  });

  criterion(9, "degenerate worlds", [&](std::string& d) {
    BenchConfig c = defaults;
    c.seeds = {9};
    c.lengths = {1, 3, 6};
    c.world.train_objects_per_class = 2;
    c.world.test_objects_per_class = 2;
    c.world.noise_sigma = 0.0;
    c.world.ambiguity.kind = "constant";
    c.world.ambiguity.value = 0.0;
    double lowest = 1.0;
    const ResultsTable separable = run_benchmark(c);
    for (const auto& [key, t] : separable.cells()) lowest = std::min(lowest, t.accuracy());

    c.world.noise_sigma = 1.0;
    c.world.ambiguity.value = 1.0;
    c.world.test_objects_per_class = 4;
    c.lengths = {3};
    const double k = c.world.num_classes;
    double worst_z = 0.0;
    const ResultsTable ambiguous = run_benchmark(c);
    for (const auto& [key, t] : ambiguous.cells()) {
      const double se = std::sqrt((1.0 / k) * (1.0 - 1.0 / k) / static_cast<double>(t.total));
      worst_z = std::max(worst_z, std::abs(t.accuracy() - 1.0 / k) / se);
    }
    char buf[160];
    std::snprintf(buf, sizeof buf,
                  "separable world lowest accuracy %.6f; ambiguous world max deviation from 1/K %.2f SE",
                  lowest, worst_z);
    d = buf;
    return lowest == 1.0 && worst_z <= 3.0;
  });

  // Golden comparison of the default benchmark summary.
  {
    const fs::path golden = fs::path(VIEWPAIR_SOURCE_DIR) / "tests/golden/default_summary.csv";
    const bool present = fs::exists(golden);
    const bool ok = present && !golden_summary.empty() && read_text(golden) == golden_summary;
    if (!ok && !golden_summary.empty()) {
      std::ofstream(fs::current_path() / "default_summary_candidate.csv", std::ios::binary) << golden_summary;
    }
    std::cout << (ok ? "PASS " : "FAIL ") << "golden default summary: "
              << (present ? (ok ? "bit-exact match" : "mismatch, candidate written")
                          : "golden file missing, candidate written")
              << std::endl;
    if (!ok) ++failures;
  }

  std::cout << (failures == 0 ? "all acceptance criteria passed" : std::to_string(failures) + " failed")
            << std::endl;
  return failures == 0 ? 0 : 1;
}

#pragma once

// Benchmark harness: configuration, per-seed experiment setup, the evaluation
// protocols (benchmark, fusion ablation, accuracy-vs-length curve) and
// result tables with fixed-format CSV / markdown output.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "viewpair/fusion.hpp"
#include "viewpair/policy.hpp"
#include "viewpair/sensorium.hpp"
#include "viewpair/viewsphere.hpp"

namespace viewpair {

// Per-view ambiguity. "constant": every view gets `value`. "harmonic": a
// smooth seeded field mean + amplitude * s(view) with s in [-1, 1], clamped
// to [0, 1]. "table": explicit `values` in linear view order.
struct AmbiguityProfile {
  std::string kind = "harmonic";
  double value = 0.0;
  double mean = 0.45;
  double amplitude = 0.45;
  std::vector<double> values;
};

std::vector<double> ambiguity_values(const AmbiguityProfile& profile, const GridSpec& grid,
                                     std::uint64_t seed);

struct WorldConfig {
  int num_classes = 10;
  int feature_dim = 8;
  double noise_sigma = 0.6;
  AmbiguityProfile ambiguity;
  int train_objects_per_class = 20;
  int test_objects_per_class = 20;
};

struct TrainingConfig {
  int samples_per_pose = 200;
  int min_samples = 50;
  int quality_samples = 20;
};

// A classification method: one of the four fusion variants or view voting.
struct Method {
  std::optional<FusionVariant> fusion;

  bool is_vote() const { return !fusion.has_value(); }
  std::string name() const;
  static std::optional<Method> parse(std::string_view name);

  friend bool operator==(const Method&, const Method&) = default;
};

struct BenchConfig {
  GridSpec grid;
  WorldConfig world;
  std::vector<int> lengths{3, 6, 12};
  std::vector<Strategy> strategies = all_strategies();
  std::vector<Method> methods{Method{FusionVariant{PairSelection::All, true}}, Method{}};
  double beta = 1.0;
  TrainingConfig training;
  int horizon_cap = kDefaultPlannerHorizon;
  int ablation_length = 6;
  std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5};
  std::string out_dir = "results";
  int jobs = 1;
  std::optional<std::string> scores_path;

  // Throws ConfigError describing the first violation.
  void validate() const;
};

// Missing keys keep their defaults; unknown keys are rejected.
BenchConfig config_from_json_text(const std::string& text);
BenchConfig load_config(const std::filesystem::path& path);
std::string config_to_json_text(const BenchConfig& config);

// World, oracle, object split and fitted models for one seed.
class Experiment {
 public:
  // With `table` set, the oracle is the ingested score table and the seed
  // only affects sampling during training.
  Experiment(const BenchConfig& config, std::uint64_t seed, const ScoreTable* table = nullptr);
  ~Experiment();
  Experiment(const Experiment&) = delete;
  Experiment& operator=(const Experiment&) = delete;

  std::uint64_t seed() const { return seed_; }
  const ClassifierOracle& oracle() const { return *oracle_; }
  const SyntheticWorld* world() const { return world_ ? &*world_ : nullptr; }
  const std::vector<ObjectRef>& train_objects() const { return train_; }
  const std::vector<ObjectRef>& test_objects() const { return test_; }
  const WeightTable& weights() const { return *weights_; }
  const NbvPolicy& nbv() const { return *nbv_; }
  const QualityPredictor& quality() const { return *quality_; }
  Models models() const { return {*oracle_, *weights_, *nbv_, *quality_}; }

  EpisodeSeeds episode_seeds(const ObjectRef& object, ViewIndex start, Strategy strategy) const;

 private:
  std::uint64_t seed_;
  std::optional<SyntheticWorld> world_;
  std::unique_ptr<ClassifierOracle> oracle_;
  std::vector<ObjectRef> train_;
  std::vector<ObjectRef> test_;
  std::unique_ptr<WeightTable> weights_;
  std::unique_ptr<NbvPolicy> nbv_;
  std::unique_ptr<QualityPredictor> quality_;
};

WorldParams world_params(const BenchConfig& config, std::uint64_t seed);

// Objects ids: training objects first, class-major.
void synthetic_objects(const WorldConfig& world, std::vector<ObjectRef>& train,
                       std::vector<ObjectRef>& test);

// Samples one observation per (object, view) and stores its per-class
// Gaussian log-likelihoods. Object ids are "obj<id>".
ScoreTable make_score_table(const SyntheticWorld& world, std::span<const ObjectRef> objects,
                            std::uint64_t seed);

// -------------------------------------------------------------------------
// Results

struct ResultKey {
  std::string strategy;
  std::string method;
  int length = 0;
  std::uint64_t seed = 0;

  friend auto operator<=>(const ResultKey&, const ResultKey&) = default;
};

struct Tally {
  std::size_t correct = 0;
  std::size_t total = 0;

  double accuracy() const { return total ? static_cast<double>(correct) / total : 0.0; }
};

struct SummaryRow {
  std::string strategy;
  std::string method;
  int length = 0;
  std::size_t seeds = 0;
  double mean = 0.0;
  double std_dev = 0.0;
};

class ResultsTable {
 public:
  void add(const ResultKey& key, Tally tally);
  const std::map<ResultKey, Tally>& cells() const { return cells_; }
  bool empty() const { return cells_.empty(); }
  const Tally& at(const ResultKey& key) const;

  // Mean and sample standard deviation of accuracy across seeds.
  std::vector<SummaryRow> summarize() const;
  // Mean accuracy across seeds for one (strategy, method, length).
  double mean_accuracy(const std::string& strategy, const std::string& method,
                       int length) const;

 private:
  std::map<ResultKey, Tally> cells_;
};

// strategy,method,length,seed,correct,total,accuracy (6 decimals)
std::string results_csv(const ResultsTable& table);
ResultsTable parse_results_csv(const std::string& text);
// strategy,method,length,seeds,mean_accuracy,std_accuracy (6 decimals)
std::string summary_csv(const ResultsTable& table);
std::string summary_markdown(const ResultsTable& table, const std::string& title);

enum class OutputFormat { Csv, Markdown };
void emit_results(const ResultsTable& table, OutputFormat format,
                  const std::filesystem::path& path, const std::string& title = "Results");

// -------------------------------------------------------------------------
// Protocols. Every test object is run once from every grid viewpoint; the
// accuracy of a cell is correct / total over those episodes.

ResultsTable run_benchmark(const BenchConfig& config, const ScoreTable* table = nullptr);

// Random trajectories of config.ablation_length views, classified by all four
// fusion variants on identical observation sequences.
ResultsTable ablation_table(const BenchConfig& config, const ScoreTable* table = nullptr);

// Accuracy at every prefix length 1..max(lengths) of each episode.
ResultsTable accuracy_curve(const BenchConfig& config, const ScoreTable* table = nullptr);

// Runs the episodes of one (strategy, views) cell and tallies each method at
// each requested prefix length. Result indexed [method][prefix].
std::vector<std::vector<Tally>> tally_episodes(const Experiment& experiment,
                                               Strategy strategy, int views,
                                               const std::vector<Method>& methods,
                                               const std::vector<int>& prefixes,
                                               const BenchConfig& config);

}  // namespace viewpair

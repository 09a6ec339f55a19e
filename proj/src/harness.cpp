#include <algorithm>
#include <atomic>
#include <cstdio>
#include <thread>

#include "viewpair/errors.hpp"
#include "viewpair/harness.hpp"

namespace viewpair {

WorldParams world_params(const BenchConfig& config, std::uint64_t seed) {
  WorldParams p;
  p.seed = seed;
  p.num_classes = config.world.num_classes;
  p.grid = config.grid;
  p.feature_dim = config.world.feature_dim;
  p.noise_sigma = config.world.noise_sigma;
  p.ambiguity = ambiguity_values(config.world.ambiguity, config.grid, seed);
  return p;
}

void synthetic_objects(const WorldConfig& world, std::vector<ObjectRef>& train,
                       std::vector<ObjectRef>& test) {
  train.clear();
  test.clear();
  std::size_t id = 0;
  for (Label c = 0; c < world.num_classes; ++c)
    for (int i = 0; i < world.train_objects_per_class; ++i) train.push_back({id++, c});
  for (Label c = 0; c < world.num_classes; ++c)
    for (int i = 0; i < world.test_objects_per_class; ++i) test.push_back({id++, c});
}

namespace {

// Per class, the first half of the table's objects train and the rest test;
// a class with a single object uses it for both.
void split_table_objects(const ScoreTable& table, std::vector<ObjectRef>& train,
                         std::vector<ObjectRef>& test) {
  std::vector<std::vector<ObjectRef>> by_class(static_cast<std::size_t>(table.num_classes()));
  for (std::size_t o = 0; o < table.num_objects(); ++o)
    by_class[static_cast<std::size_t>(table.true_class(o))].push_back({o, table.true_class(o)});
  for (const auto& objs : by_class) {
    if (objs.size() == 1) {
      train.push_back(objs[0]);
      test.push_back(objs[0]);
      continue;
    }
    const std::size_t half = objs.size() / 2;
    train.insert(train.end(), objs.begin(), objs.begin() + static_cast<std::ptrdiff_t>(half));
    test.insert(test.end(), objs.begin() + static_cast<std::ptrdiff_t>(half), objs.end());
  }
}

}  // namespace

Experiment::Experiment(const BenchConfig& config, std::uint64_t seed, const ScoreTable* table)
    : seed_(seed) {
  if (table) {
    if (!(table->grid() == config.grid)) {
      throw ConfigError("score table grid differs from the configured grid");
    }
    split_table_objects(*table, train_, test_);
    oracle_ = std::make_unique<ScoreTableOracle>(*table, train_);
  } else {
    world_.emplace(gen_world(world_params(config, seed)));
    synthetic_objects(config.world, train_, test_);
    oracle_ = std::make_unique<SyntheticOracle>(*world_);
  }
  WeightLearningOptions wopt;
  wopt.samples_per_pose = config.training.samples_per_pose;
  wopt.min_samples = config.training.min_samples;
  wopt.beta = config.beta;
  weights_ = std::make_unique<WeightTable>(learn_weights(*oracle_, train_, wopt, seed));
  nbv_ = std::make_unique<NbvPolicy>(*oracle_);
  quality_ = std::make_unique<QualityPredictor>(
      fit_quality_predictor(*oracle_, train_, config.training.quality_samples, seed));
}

Experiment::~Experiment() = default;

EpisodeSeeds Experiment::episode_seeds(const ObjectRef& object, ViewIndex start,
                                       Strategy strategy) const {
  const auto s = static_cast<std::uint64_t>(oracle_->grid().linear(start));
  return {derive_seed(seed_, {stream::kObservation, object.id, s}),
          derive_seed(seed_, {stream::kPath, object.id, s,
                              static_cast<std::uint64_t>(strategy)})};
}

ScoreTable make_score_table(const SyntheticWorld& world, std::span<const ObjectRef> objects,
                            std::uint64_t seed) {
  ScoreTable table(world.grid(), world.num_classes());
  char name[32];
  for (const ObjectRef& obj : objects) {
    std::snprintf(name, sizeof name, "obj%05zu", obj.id);
    const std::size_t o = table.add_object(name, obj.label);
    const auto obs_seed = derive_seed(seed, {stream::kObservation, obj.id});
    for (const ViewIndex& v : all_views(world.grid())) {
      Rng rng = make_rng(obs_seed, {static_cast<std::uint64_t>(world.grid().linear(v))});
      table.set_scores(o, v, log_likelihoods(world, observe(world, obj.label, v, rng)));
    }
  }
  return table;
}

// -------------------------------------------------------------------------

std::vector<std::vector<Tally>> tally_episodes(const Experiment& experiment,
                                               Strategy strategy, int views,
                                               const std::vector<Method>& methods,
                                               const std::vector<int>& prefixes,
                                               const BenchConfig& config) {
  for (int p : prefixes) require(p >= 1 && p <= views, "tally_episodes: prefix out of range");
  EpisodeOptions options;
  options.strategy = strategy;
  options.views = views;
  options.horizon_cap = config.horizon_cap;
  options.fusions.clear();
  std::vector<int> column;  // method -> fusion index, or -1 for voting
  for (const Method& m : methods) {
    if (m.is_vote()) {
      options.vote = true;
      column.push_back(-1);
    } else {
      column.push_back(static_cast<int>(options.fusions.size()));
      options.fusions.push_back(*m.fusion);
    }
  }

  const auto starts = all_views(experiment.oracle().grid());
  const auto& objects = experiment.test_objects();
  const std::size_t total = objects.size() * starts.size();
  const Models models = experiment.models();

  using Tallies = std::vector<std::vector<Tally>>;
  const auto empty = Tallies(methods.size(), std::vector<Tally>(prefixes.size()));
  const auto worker = [&](std::atomic<std::size_t>& next, Tallies& out) {
    for (std::size_t i = next++; i < total; i = next++) {
      const ObjectRef& obj = objects[i / starts.size()];
      const ViewIndex start = starts[i % starts.size()];
      const EpisodeResult r = run_episode(models, obj, start, options,
                                          experiment.episode_seeds(obj, start, strategy));
      for (std::size_t m = 0; m < methods.size(); ++m) {
        const auto& labels = column[m] < 0 ? r.votes : r.predictions[static_cast<std::size_t>(column[m])];
        for (std::size_t p = 0; p < prefixes.size(); ++p) {
          Tally& t = out[m][p];
          ++t.total;
          if (labels[static_cast<std::size_t>(prefixes[p] - 1)] == obj.label) ++t.correct;
        }
      }
    }
  };

  std::atomic<std::size_t> next{0};
  const int jobs = std::max(1, config.jobs);
  std::vector<Tallies> partial(static_cast<std::size_t>(jobs), empty);
  if (jobs == 1) {
    worker(next, partial[0]);
  } else {
    std::vector<std::jthread> pool;
    for (int t = 0; t < jobs; ++t)
      pool.emplace_back([&, t] { worker(next, partial[static_cast<std::size_t>(t)]); });
  }
  // Integer sums, so the merge is independent of scheduling.
  Tallies merged = empty;
  for (const Tallies& part : partial)
    for (std::size_t m = 0; m < methods.size(); ++m)
      for (std::size_t p = 0; p < prefixes.size(); ++p) {
        merged[m][p].correct += part[m][p].correct;
        merged[m][p].total += part[m][p].total;
      }
  return merged;
}

ResultsTable run_benchmark(const BenchConfig& config, const ScoreTable* table) {
  config.validate();
  ResultsTable results;
  for (std::uint64_t seed : config.seeds) {
    const Experiment experiment(config, seed, table);
    for (Strategy strategy : config.strategies) {
      for (int length : config.lengths) {
        const auto tallies =
            tally_episodes(experiment, strategy, length, config.methods, {length}, config);
        for (std::size_t m = 0; m < config.methods.size(); ++m) {
          results.add({to_string(strategy), config.methods[m].name(), length, seed},
                      tallies[m][0]);
        }
      }
    }
  }
  return results;
}

ResultsTable ablation_table(const BenchConfig& config, const ScoreTable* table) {
  config.validate();
  std::vector<Method> variants;
  for (PairSelection sel : {PairSelection::All, PairSelection::Best})
    for (bool weighted : {true, false}) variants.push_back(Method{FusionVariant{sel, weighted}});
  ResultsTable results;
  for (std::uint64_t seed : config.seeds) {
    const Experiment experiment(config, seed, table);
    const auto tallies = tally_episodes(experiment, Strategy::Random, config.ablation_length,
                                        variants, {config.ablation_length}, config);
    for (std::size_t m = 0; m < variants.size(); ++m) {
      results.add({to_string(Strategy::Random), variants[m].name(), config.ablation_length, seed},
                  tallies[m][0]);
    }
  }
  return results;
}

ResultsTable accuracy_curve(const BenchConfig& config, const ScoreTable* table) {
  config.validate();
  const int longest = *std::max_element(config.lengths.begin(), config.lengths.end());
  std::vector<int> prefixes(static_cast<std::size_t>(longest));
  for (int p = 1; p <= longest; ++p) prefixes[static_cast<std::size_t>(p - 1)] = p;
  ResultsTable results;
  for (std::uint64_t seed : config.seeds) {
    const Experiment experiment(config, seed, table);
    for (Strategy strategy : config.strategies) {
      const auto tallies =
          tally_episodes(experiment, strategy, longest, config.methods, prefixes, config);
      for (std::size_t m = 0; m < config.methods.size(); ++m)
        for (std::size_t p = 0; p < prefixes.size(); ++p)
          results.add({to_string(strategy), config.methods[m].name(), prefixes[p], seed},
                      tallies[m][p]);
    }
  }
  return results;
}

}  // namespace viewpair

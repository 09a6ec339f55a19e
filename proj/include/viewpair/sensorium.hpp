#pragma once

// Classifier oracles: a seeded synthetic generative world with an exact Bayes
// pair classifier, and a bridge for externally produced per-view class
// log-likelihood tables.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "viewpair/rng.hpp"
#include "viewpair/viewsphere.hpp"

namespace viewpair {

using Label = int;

struct ClassDistribution {
  std::vector<double> probs;

  static ClassDistribution uniform(std::size_t num_classes);
  // Softmax of log-domain scores. -inf entries get probability 0; if every
  // entry is -inf the result is uniform.
  static ClassDistribution from_log_scores(std::span<const double> log_scores);

  std::size_t size() const { return probs.size(); }
  double operator[](std::size_t k) const { return probs[k]; }
  // Ties go to the lowest class index.
  Label argmax() const;
  bool is_valid(double tolerance = 1e-9) const;
};

struct Observation {
  std::vector<double> features;
  ViewIndex view;
};

struct ViewPair {
  Observation first;
  Observation second;
  RelativePose pose;

  static ViewPair make(const GridSpec& grid, Observation a, Observation b);
};

// -------------------------------------------------------------------------
// Synthetic world

struct WorldParams {
  std::uint64_t seed = 0;
  int num_classes = 10;
  GridSpec grid;
  int feature_dim = 8;
  double noise_sigma = 1.0;
  // One value in [0, 1] per view (linear order). Empty means all zeros.
  std::vector<double> ambiguity;

  friend bool operator==(const WorldParams&, const WorldParams&) = default;
};

class SyntheticWorld {
 public:
  SyntheticWorld(WorldParams params, std::vector<double> signatures);

  const WorldParams& params() const { return params_; }
  const GridSpec& grid() const { return params_.grid; }
  int num_classes() const { return params_.num_classes; }
  int feature_dim() const { return params_.feature_dim; }
  double noise_sigma() const { return params_.noise_sigma; }
  double ambiguity(ViewIndex v) const;

  std::span<const double> signature(Label label, ViewIndex v) const;

  friend bool operator==(const SyntheticWorld&, const SyntheticWorld&) = default;

 private:
  WorldParams params_;
  std::vector<double> signatures_;  // [class][view][dim]
};

// Signatures ~ N(0, 1) per (class, view, dim), then blended at each view
// toward the cross-class mean by that view's ambiguity.
SyntheticWorld gen_world(const WorldParams& params);

Observation observe(const SyntheticWorld& world, Label label, ViewIndex v, Rng& rng);

// Exact posteriors under a uniform class prior, computed in the log domain.
// With zero noise the posterior is the sigma -> 0 limit: uniform over the
// classes at minimum squared distance.
ClassDistribution single_posterior(const SyntheticWorld& world, const Observation& obs);
ClassDistribution pair_posterior(const SyntheticWorld& world, const ViewPair& pair);

// Per-class Gaussian log-likelihood of one observation, constants included.
std::vector<double> log_likelihoods(const SyntheticWorld& world, const Observation& obs);

// -------------------------------------------------------------------------
// Score tables

class ScoreTable {
 public:
  ScoreTable(GridSpec grid, int num_classes);

  const GridSpec& grid() const { return grid_; }
  int num_classes() const { return num_classes_; }
  std::size_t num_objects() const { return ids_.size(); }

  // Registers an object if unseen; returns its index.
  std::size_t add_object(const std::string& id, Label true_class);
  void set_scores(std::size_t object, ViewIndex v, std::span<const double> scores);

  const std::string& object_id(std::size_t object) const { return ids_.at(object); }
  Label true_class(std::size_t object) const { return labels_.at(object); }
  std::size_t object_index(const std::string& id) const;
  bool has_cell(std::size_t object, ViewIndex v) const;
  std::span<const double> scores(std::size_t object, ViewIndex v) const;

  // Throws CompletenessError naming the first missing (object, view) cell.
  void validate_complete() const;

  friend bool operator==(const ScoreTable&, const ScoreTable&) = default;

 private:
  std::size_t cell(std::size_t object, ViewIndex v) const;

  GridSpec grid_;
  int num_classes_;
  std::vector<std::string> ids_;
  std::vector<Label> labels_;
  std::map<std::string, std::size_t> index_;
  std::vector<double> scores_;     // [object][view][class]
  std::vector<char> populated_;    // [object][view]
};

// CSV: object_id,true_class,azimuth,elevation,s0,...,s{K-1}
void save_score_table(const ScoreTable& table, const std::filesystem::path& path);
ScoreTable load_score_table(const std::filesystem::path& path, const GridSpec& grid);

// Softmax of the summed per-view log-likelihood vectors.
ClassDistribution posterior_from_scores(const ScoreTable& table, const std::string& object,
                                        std::span<const ViewIndex> views);

// -------------------------------------------------------------------------
// Oracle interface used by fusion, policies and the harness.

struct ObjectRef {
  std::size_t id = 0;
  Label label = 0;
};

class ClassifierOracle {
 public:
  virtual ~ClassifierOracle() = default;

  virtual const GridSpec& grid() const = 0;
  virtual int num_classes() const = 0;

  virtual Observation observe(const ObjectRef& object, ViewIndex v, Rng& rng) const = 0;
  // Noise-free prototype observation of a class at a view.
  virtual Observation prototype(Label label, ViewIndex v) const = 0;

  virtual ClassDistribution single_posterior(const Observation& obs) const = 0;
  virtual ClassDistribution pair_posterior(const Observation& a, const Observation& b) const = 0;
};

class SyntheticOracle final : public ClassifierOracle {
 public:
  explicit SyntheticOracle(const SyntheticWorld& world) : world_(world) {}

  const SyntheticWorld& world() const { return world_; }
  const GridSpec& grid() const override { return world_.grid(); }
  int num_classes() const override { return world_.num_classes(); }
  Observation observe(const ObjectRef& object, ViewIndex v, Rng& rng) const override;
  Observation prototype(Label label, ViewIndex v) const override;
  ClassDistribution single_posterior(const Observation& obs) const override;
  ClassDistribution pair_posterior(const Observation& a, const Observation& b) const override;

 private:
  const SyntheticWorld& world_;
};

// Observations are the table rows themselves; prototypes are per-class mean
// rows over the given prototype objects.
class ScoreTableOracle final : public ClassifierOracle {
 public:
  ScoreTableOracle(const ScoreTable& table, std::span<const ObjectRef> prototype_objects);

  const GridSpec& grid() const override { return table_.grid(); }
  int num_classes() const override { return table_.num_classes(); }
  Observation observe(const ObjectRef& object, ViewIndex v, Rng& rng) const override;
  Observation prototype(Label label, ViewIndex v) const override;
  ClassDistribution single_posterior(const Observation& obs) const override;
  ClassDistribution pair_posterior(const Observation& a, const Observation& b) const override;

 private:
  const ScoreTable& table_;
  std::vector<double> prototypes_;  // [class][view][class]
};

}  // namespace viewpair

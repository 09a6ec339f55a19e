#pragma once

// Pairwise decomposition of a view sequence and the weighted ensemble that
// fuses per-pair class distributions into one sequence-level distribution.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "viewpair/sensorium.hpp"
#include "viewpair/viewsphere.hpp"

namespace viewpair {

inline constexpr double kProbabilityFloor = 1e-12;

// -ln p(true class), with p floored at kProbabilityFloor.
double cross_entropy(const ClassDistribution& dist, Label true_class);

// Positions i < j within a sequence.
struct IndexPair {
  std::size_t first = 0;
  std::size_t second = 0;

  friend auto operator<=>(const IndexPair&, const IndexPair&) = default;
};

// All M(M-1)/2 position pairs, ordered by (first, second).
std::vector<IndexPair> enumerate_pairs(std::size_t sequence_length);

// Per relative pose: the mean training cross entropy and the fusion weight
// lambda = exp(-beta * mean_cross_entropy).
class WeightTable {
 public:
  struct Entry {
    double mean_cross_entropy = 0.0;
    double lambda = 1.0;
    friend bool operator==(const Entry&, const Entry&) = default;
  };

  WeightTable() = default;
  explicit WeightTable(std::map<RelativePose, Entry> entries) : entries_(std::move(entries)) {}

  static WeightTable from_cross_entropy(const std::map<RelativePose, double>& mean_ce,
                                        double beta);

  // Throws LookupError for an unknown pose.
  double lambda(RelativePose pose) const;
  const Entry& entry(RelativePose pose) const;
  bool contains(RelativePose pose) const { return entries_.contains(pose); }
  const std::map<RelativePose, Entry>& entries() const { return entries_; }
  bool covers(const GridSpec& grid) const;

  friend bool operator==(const WeightTable&, const WeightTable&) = default;

 private:
  std::map<RelativePose, Entry> entries_;
};

// CSV: d_azimuth,d_elevation,mean_cross_entropy,lambda
void save_weight_table(const WeightTable& table, const std::filesystem::path& path);
WeightTable load_weight_table(const std::filesystem::path& path);

struct WeightLearningOptions {
  int samples_per_pose = 200;
  int min_samples = 50;
  double beta = 1.0;
};

struct WeightSample {
  RelativePose pose;
  ObjectRef object;
  Observation first;
  Observation second;
};

// The training pairs learn_weights draws: samples_per_pose pairs for every
// realisable pose, each from a uniformly chosen training object and origin.
std::vector<WeightSample> sample_weight_pairs(const ClassifierOracle& oracle,
                                              std::span<const ObjectRef> training,
                                              const WeightLearningOptions& options,
                                              std::uint64_t seed);

// Averages the pair classifier's cross entropy per pose over
// sample_weight_pairs. Throws CoverageError when a pose ends up with
// fewer than min_samples pairs.
WeightTable learn_weights(const ClassifierOracle& oracle, std::span<const ObjectRef> training,
                          const WeightLearningOptions& options, std::uint64_t seed);

enum class PairSelection { All, Best };

// Which pairs feed the ensemble and whether lambda weights them.
struct FusionVariant {
  PairSelection selection = PairSelection::All;
  bool weighted = true;

  friend bool operator==(const FusionVariant&, const FusionVariant&) = default;
};

std::string to_string(FusionVariant variant);

// All: identity. Best: the min(M, N) pairs with largest lambda, ties broken
// by (first, second). `views` holds the sequence the pair indices refer to.
std::vector<IndexPair> select_pairs(const GridSpec& grid, std::span<const ViewIndex> views,
                                    std::span<const IndexPair> pairs,
                                    const WeightTable* weights, PairSelection mode);

// sum_i lambda_i p_i, renormalised. Without weights every pair counts 1/N.
ClassDistribution fuse(std::span<const ClassDistribution> pair_distributions,
                       std::span<const RelativePose> pair_poses, const WeightTable* weights);

struct Classification {
  Label label = 0;
  ClassDistribution distribution;
};

// Observations of one sequence with their classified pairs. Appending an
// observation pairs it with every earlier one.
class SequenceRecord {
 public:
  explicit SequenceRecord(const ClassifierOracle& oracle) : oracle_(&oracle) {}

  void append(Observation obs);

  std::size_t size() const { return observations_.size(); }
  const std::vector<Observation>& observations() const { return observations_; }
  std::vector<ViewIndex> views() const;
  // Pairs in enumerate_pairs order for the current length.
  const std::vector<IndexPair>& pairs() const { return pairs_; }
  const ClassDistribution& pair_distribution(std::size_t i) const { return pair_dists_[i]; }
  const ClassDistribution& single_distribution(std::size_t i) const { return single_dists_[i]; }

  // Classifies the first `prefix` observations (0 means all).
  Classification classify(const WeightTable* weights, FusionVariant variant,
                          std::size_t prefix = 0) const;
  Label vote(std::size_t prefix = 0) const;

 private:
  const ClassifierOracle* oracle_;
  std::vector<Observation> observations_;
  std::vector<ClassDistribution> single_dists_;
  std::vector<IndexPair> pairs_;
  std::vector<ClassDistribution> pair_dists_;
  std::vector<RelativePose> pair_poses_;
};

// One observation falls back to the single-view posterior; otherwise pairs
// are classified, selected and fused.
Classification classify_sequence(const ClassifierOracle& oracle, const WeightTable* weights,
                                 std::span<const Observation> observations,
                                 FusionVariant variant);

// View Voting baseline: argmax of the mean single-view posterior.
Label vote_views(const ClassifierOracle& oracle, std::span<const Observation> observations);

}  // namespace viewpair

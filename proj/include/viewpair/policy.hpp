#pragma once

// Active view selection: next-best-view lookup policies, a tabular predictor
// of pair cross entropy, the accumulated per-view score table, and the
// receding-horizon trajectory planner that consumes it.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "viewpair/fusion.hpp"
#include "viewpair/sensorium.hpp"
#include "viewpair/viewsphere.hpp"

namespace viewpair {

// Maps a raw observation to the (class, view) cell whose prototype is
// nearest in Euclidean distance. Only prototypes at the observation's own
// view compete, since camera pose is known. Ties go to the lowest class.
class SignatureBank {
 public:
  explicit SignatureBank(const ClassifierOracle& oracle);

  Label dispatch(const Observation& obs) const;
  std::span<const double> prototype(Label label, ViewIndex v) const;

 private:
  GridSpec grid_;
  int num_classes_ = 0;
  std::size_t width_ = 0;
  std::vector<double> prototypes_;  // [class][view][feature]
};

struct NbvTarget {
  Label label = 0;
  ViewIndex view;
  RelativePose best;
};

enum class NbvMode { Global, Adjacent };

class NbvPolicy {
 public:
  explicit NbvPolicy(const ClassifierOracle& oracle);

  const GridSpec& grid() const { return grid_; }
  int num_classes() const { return num_classes_; }
  const SignatureBank& bank() const { return bank_; }

  RelativePose best_pose(Label label, ViewIndex v) const;
  // p(label | prototype pair (v, target)); -1 for target == v.
  double partner_score(Label label, ViewIndex v, ViewIndex target) const;
  std::vector<NbvTarget> targets() const;

  // Global applies the cell's stored pose; Adjacent takes the best-scoring
  // neighbour. A visited choice is replaced by the best-scoring unvisited
  // candidate (neighbours first in Adjacent mode, then the whole sphere).
  // Empty once every view has been visited.
  std::optional<ViewIndex> next(const Observation& obs, NbvMode mode,
                                std::span<const ViewIndex> visited) const;

 private:
  std::size_t cell(Label label, ViewIndex v) const;
  bool better(Label label, ViewIndex from, ViewIndex a, ViewIndex b) const;

  GridSpec grid_;
  int num_classes_;
  SignatureBank bank_;
  std::vector<double> scores_;       // [class][view][target]
  std::vector<RelativePose> best_;   // [class][view]
};

// For every (class, view): the partner view whose prototype pair gives the
// highest true-class probability, as a relative pose. Ties go to the
// lexicographically smallest pose.
std::vector<NbvTarget> build_nbv_targets(const ClassifierOracle& oracle);

std::optional<ViewIndex> nbv_next(const NbvPolicy& policy, const Observation& obs,
                                  NbvMode mode, std::span<const ViewIndex> visited);

// CSV: class,azimuth,elevation,best_d_azimuth,best_d_elevation
void save_nbv_policy(const NbvPolicy& policy, const std::filesystem::path& path);

// Predicted pair cross entropy h(target | class, view), stored as a table.
class QualityPredictor {
 public:
  QualityPredictor(const ClassifierOracle& oracle, std::vector<double> table);

  const GridSpec& grid() const { return grid_; }
  int num_classes() const { return num_classes_; }
  const SignatureBank& bank() const { return bank_; }

  double h_hat(Label label, ViewIndex v, ViewIndex target) const;
  // Row of predictions over all targets (linear order) for the dispatched cell.
  std::span<const double> predict(const Observation& obs) const;
  std::span<const double> row(Label label, ViewIndex v) const;

 private:
  GridSpec grid_;
  int num_classes_;
  SignatureBank bank_;
  std::vector<double> table_;  // [class][view][target]
};

// Tabular least-squares fit: each cell is the mean cross entropy over
// `samples_per_cell` noisy pairs drawn from training objects of that class.
QualityPredictor fit_quality_predictor(const ClassifierOracle& oracle,
                                       std::span<const ObjectRef> training,
                                       int samples_per_cell, std::uint64_t seed);

// CSV: class,azimuth,elevation,target_azimuth,target_elevation,h_hat
void save_quality_predictor(const QualityPredictor& predictor,
                            const std::filesystem::path& path);

// Pair quality used by the planner: q = exp(-h_hat), in (0, 1].
inline double pair_quality(double h_hat) { return std::exp(-h_hat); }

// Visited views and the accumulated score g_u of every unvisited view.
class EpisodeState {
 public:
  explicit EpisodeState(const GridSpec& grid);

  const GridSpec& grid() const { return grid_; }
  const std::vector<ViewIndex>& visited() const { return visited_; }
  bool is_visited(ViewIndex v) const { return visited_mask_[idx(v)] != 0; }
  bool is_visited(int linear_index) const {
    return visited_mask_[static_cast<std::size_t>(linear_index)] != 0;
  }
  std::size_t num_unvisited() const {
    return static_cast<std::size_t>(grid_.size()) - visited_.size();
  }
  ViewIndex current() const;

  // Zero for visited views.
  double g(ViewIndex u) const { return g_[idx(u)]; }
  const std::vector<double>& g_table() const { return g_; }
  // Per visited view (in visit order): the quality terms it contributed.
  const std::vector<std::vector<double>>& contributions() const { return contributions_; }

  // Adds view v with per-target qualities (linear order).
  void add_observation(ViewIndex v, std::vector<double> quality);
  void observe(const Observation& obs, const QualityPredictor& predictor);

  // g recomputed from the stored contributions.
  std::vector<double> recompute_g() const;

 private:
  std::size_t idx(ViewIndex v) const;

  GridSpec grid_;
  std::vector<ViewIndex> visited_;
  std::vector<char> visited_mask_;
  std::vector<double> g_;
  std::vector<std::vector<double>> contributions_;
};

EpisodeState update_costs(EpisodeState state, const Observation& obs,
                          const QualityPredictor& predictor);

// Sum of g over the distinct unvisited views on the path, in linear order.
double score_trajectory(const EpisodeState& state, const Path& path);

inline constexpr int kDefaultPlannerHorizon = 5;

struct NextView {
  ViewIndex view;
  double score = 0.0;
  // True when no unvisited neighbour existed and the move is a jump.
  bool fallback = false;
};

// For each unvisited neighbour u of the current view, the best score among
// walks of min(remaining_steps - 1, horizon_cap) moves starting at u; returns
// the u with the highest such score, ties to the smallest (azimuth,
// elevation). Falls back to the highest-g unvisited view when every
// neighbour is visited; empty when nothing is left to visit.
std::optional<NextView> optimised_next(const EpisodeState& state, int remaining_steps,
                                       int horizon_cap = kDefaultPlannerHorizon);

// -------------------------------------------------------------------------
// Episodes

enum class Strategy { Random, Straight, NbvGlobal, NbvAdjacent, Optimised };

std::string to_string(Strategy strategy);
std::optional<Strategy> parse_strategy(std::string_view name);
std::vector<Strategy> all_strategies();

struct Models {
  const ClassifierOracle& oracle;
  const WeightTable& weights;
  const NbvPolicy& nbv;
  const QualityPredictor& quality;
};

struct EpisodeOptions {
  Strategy strategy = Strategy::Random;
  int views = 6;
  std::vector<FusionVariant> fusions{FusionVariant{}};
  bool vote = false;
  int horizon_cap = kDefaultPlannerHorizon;
  // Straight strategy direction; drawn from the path stream when unset.
  std::optional<RelativePose> straight_direction;
};

struct EpisodeSeeds {
  std::uint64_t observation = 0;
  std::uint64_t path = 0;
};

struct EpisodeResult {
  Path path;
  // jumped[i] is true when step i -> i+1 left the adjacency graph.
  std::vector<bool> jumped;
  // predictions[f][m - 1]: label from fusion variant f after m views.
  std::vector<std::vector<Label>> predictions;
  std::vector<Label> votes;
  // g table after every observation, when the strategy is Optimised.
  std::vector<EpisodeState> states;

  Label prediction(std::size_t fusion = 0) const { return predictions.at(fusion).back(); }
};

// Observations depend only on (observation seed, view), so strategies that
// visit the same view of the same object see the same data.
Observation episode_observation(const ClassifierOracle& oracle, const ObjectRef& object,
                                ViewIndex v, std::uint64_t observation_seed);

EpisodeResult run_episode(const Models& models, const ObjectRef& object, ViewIndex start,
                          const EpisodeOptions& options, const EpisodeSeeds& seeds,
                          bool keep_states = false);

}  // namespace viewpair

#include "viewpair/sensorium.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "viewpair/errors.hpp"

namespace viewpair {

ClassDistribution ClassDistribution::uniform(std::size_t num_classes) {
  require(num_classes > 0, "uniform distribution needs at least one class");
  return {std::vector<double>(num_classes, 1.0 / static_cast<double>(num_classes))};
}

ClassDistribution ClassDistribution::from_log_scores(std::span<const double> log_scores) {
  require(!log_scores.empty(), "from_log_scores: empty score vector");
  const double top = *std::max_element(log_scores.begin(), log_scores.end());
  if (!std::isfinite(top)) {
    require(top < 0, "from_log_scores: scores must not contain +inf or NaN");
    return uniform(log_scores.size());
  }
  ClassDistribution out{std::vector<double>(log_scores.size())};
  double total = 0.0;
  for (std::size_t k = 0; k < log_scores.size(); ++k) {
    out.probs[k] = std::exp(log_scores[k] - top);
    total += out.probs[k];
  }
  for (double& p : out.probs) p /= total;
  return out;
}

Label ClassDistribution::argmax() const {
  return static_cast<Label>(std::max_element(probs.begin(), probs.end()) - probs.begin());
}

bool ClassDistribution::is_valid(double tolerance) const {
  if (probs.empty()) return false;
  double total = 0.0;
  for (double p : probs) {
    if (!(p >= 0.0) || !std::isfinite(p)) return false;
    total += p;
  }
  return std::abs(total - 1.0) <= tolerance;
}

ViewPair ViewPair::make(const GridSpec& grid, Observation a, Observation b) {
  const RelativePose pose = relative_pose(grid, a.view, b.view);
  return {std::move(a), std::move(b), pose};
}

// -------------------------------------------------------------------------

SyntheticWorld::SyntheticWorld(WorldParams params, std::vector<double> signatures)
    : params_(std::move(params)), signatures_(std::move(signatures)) {
  const auto expected = static_cast<std::size_t>(params_.num_classes) *
                        static_cast<std::size_t>(params_.grid.size()) *
                        static_cast<std::size_t>(params_.feature_dim);
  require(signatures_.size() == expected, "SyntheticWorld: signature table size mismatch");
}

double SyntheticWorld::ambiguity(ViewIndex v) const {
  if (params_.ambiguity.empty()) return 0.0;
  return params_.ambiguity[static_cast<std::size_t>(grid().linear(v))];
}

std::span<const double> SyntheticWorld::signature(Label label, ViewIndex v) const {
  require(label >= 0 && label < params_.num_classes, "signature: class out of range");
  require(grid().contains(v), "signature: view outside grid");
  const auto d = static_cast<std::size_t>(params_.feature_dim);
  const auto offset =
      (static_cast<std::size_t>(label) * static_cast<std::size_t>(grid().size()) +
       static_cast<std::size_t>(grid().linear(v))) * d;
  return {signatures_.data() + offset, d};
}

SyntheticWorld gen_world(const WorldParams& params) {
  params.grid.validate();
  require(params.num_classes >= 2, "gen_world: need at least 2 classes");
  require(params.feature_dim >= 1, "gen_world: feature_dim must be positive");
  require(params.noise_sigma >= 0.0 && std::isfinite(params.noise_sigma),
          "gen_world: noise_sigma must be finite and non-negative");
  require(params.ambiguity.empty() ||
              params.ambiguity.size() == static_cast<std::size_t>(params.grid.size()),
          "gen_world: ambiguity needs one entry per view");
  for (double a : params.ambiguity) {
    require(a >= 0.0 && a <= 1.0, "gen_world: ambiguity values must lie in [0, 1]");
  }

  const auto k = static_cast<std::size_t>(params.num_classes);
  const auto n = static_cast<std::size_t>(params.grid.size());
  const auto d = static_cast<std::size_t>(params.feature_dim);
  std::vector<double> sig(k * n * d);
  Rng rng = make_rng(params.seed, {stream::kWorld});
  std::normal_distribution<double> normal(0.0, 1.0);
  for (double& x : sig) x = normal(rng);

  for (std::size_t v = 0; v < n; ++v) {
    const double a = params.ambiguity.empty() ? 0.0 : params.ambiguity[v];
    for (std::size_t j = 0; j < d; ++j) {
      double mean = 0.0;
      for (std::size_t c = 0; c < k; ++c) mean += sig[(c * n + v) * d + j];
      mean /= static_cast<double>(k);
      for (std::size_t c = 0; c < k; ++c) {
        double& x = sig[(c * n + v) * d + j];
        x = mean + (1.0 - a) * (x - mean);
      }
    }
  }
  return SyntheticWorld(params, std::move(sig));
}

Observation observe(const SyntheticWorld& world, Label label, ViewIndex v, Rng& rng) {
  const auto sig = world.signature(label, v);
  Observation obs{{sig.begin(), sig.end()}, v};
  if (world.noise_sigma() > 0.0) {
    std::normal_distribution<double> noise(0.0, world.noise_sigma());
    for (double& x : obs.features) x += noise(rng);
  }
  return obs;
}

namespace {

// Accumulates squared distances from `obs` to every class signature.
void add_squared_distances(const SyntheticWorld& world, const Observation& obs,
                           std::vector<double>& dist) {
  require(obs.features.size() == static_cast<std::size_t>(world.feature_dim()),
          "observation feature dimension does not match the world");
  for (Label c = 0; c < world.num_classes(); ++c) {
    const auto sig = world.signature(c, obs.view);
    double s = 0.0;
    for (std::size_t j = 0; j < sig.size(); ++j) {
      const double r = obs.features[j] - sig[j];
      s += r * r;
    }
    dist[static_cast<std::size_t>(c)] += s;
  }
}

ClassDistribution posterior_from_distances(const SyntheticWorld& world,
                                           const std::vector<double>& dist) {
  const double sigma = world.noise_sigma();
  if (sigma == 0.0) {
    const double best = *std::min_element(dist.begin(), dist.end());
    std::vector<double> scores(dist.size());
    for (std::size_t c = 0; c < dist.size(); ++c) {
      scores[c] = dist[c] == best ? 0.0 : -std::numeric_limits<double>::infinity();
    }
    return ClassDistribution::from_log_scores(scores);
  }
  std::vector<double> scores(dist.size());
  const double scale = 1.0 / (2.0 * sigma * sigma);
  for (std::size_t c = 0; c < dist.size(); ++c) scores[c] = -dist[c] * scale;
  return ClassDistribution::from_log_scores(scores);
}

}  // namespace

ClassDistribution single_posterior(const SyntheticWorld& world, const Observation& obs) {
  std::vector<double> dist(static_cast<std::size_t>(world.num_classes()), 0.0);
  add_squared_distances(world, obs, dist);
  return posterior_from_distances(world, dist);
}

ClassDistribution pair_posterior(const SyntheticWorld& world, const ViewPair& pair) {
  std::vector<double> dist(static_cast<std::size_t>(world.num_classes()), 0.0);
  add_squared_distances(world, pair.first, dist);
  add_squared_distances(world, pair.second, dist);
  return posterior_from_distances(world, dist);
}

std::vector<double> log_likelihoods(const SyntheticWorld& world, const Observation& obs) {
  require(world.noise_sigma() > 0.0, "log_likelihoods: needs a positive noise_sigma");
  std::vector<double> dist(static_cast<std::size_t>(world.num_classes()), 0.0);
  add_squared_distances(world, obs, dist);
  const double sigma = world.noise_sigma();
  const double norm = -0.5 * world.feature_dim() * std::log(2.0 * std::numbers::pi * sigma * sigma);
  for (double& x : dist) x = norm - x / (2.0 * sigma * sigma);
  return dist;
}

// -------------------------------------------------------------------------

Observation SyntheticOracle::observe(const ObjectRef& object, ViewIndex v, Rng& rng) const {
  return viewpair::observe(world_, object.label, v, rng);
}

Observation SyntheticOracle::prototype(Label label, ViewIndex v) const {
  const auto sig = world_.signature(label, v);
  return {{sig.begin(), sig.end()}, v};
}

ClassDistribution SyntheticOracle::single_posterior(const Observation& obs) const {
  return viewpair::single_posterior(world_, obs);
}

ClassDistribution SyntheticOracle::pair_posterior(const Observation& a,
                                                  const Observation& b) const {
  return viewpair::pair_posterior(world_, ViewPair::make(world_.grid(), a, b));
}

}  // namespace viewpair

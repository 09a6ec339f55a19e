#include "viewpair/fusion.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

#include "viewpair/csv.hpp"
#include "viewpair/errors.hpp"

namespace viewpair {

double cross_entropy(const ClassDistribution& dist, Label true_class) {
  require(true_class >= 0 && static_cast<std::size_t>(true_class) < dist.size(),
          "cross_entropy: class out of range");
  return -std::log(std::max(dist[static_cast<std::size_t>(true_class)], kProbabilityFloor));
}

std::vector<IndexPair> enumerate_pairs(std::size_t sequence_length) {
  std::vector<IndexPair> pairs;
  if (sequence_length < 2) return pairs;
  pairs.reserve(sequence_length * (sequence_length - 1) / 2);
  for (std::size_t i = 0; i < sequence_length; ++i)
    for (std::size_t j = i + 1; j < sequence_length; ++j) pairs.push_back({i, j});
  return pairs;
}

// -------------------------------------------------------------------------

WeightTable WeightTable::from_cross_entropy(const std::map<RelativePose, double>& mean_ce,
                                            double beta) {
  require(beta >= 0.0 && std::isfinite(beta), "weights: beta must be finite and >= 0");
  std::map<RelativePose, Entry> entries;
  for (const auto& [pose, h] : mean_ce) {
    require(h >= 0.0 && std::isfinite(h), "weights: mean cross entropy must be finite");
    entries.emplace(pose, Entry{h, std::exp(-beta * h)});
  }
  return WeightTable(std::move(entries));
}

const WeightTable::Entry& WeightTable::entry(RelativePose pose) const {
  auto it = entries_.find(pose);
  if (it == entries_.end()) {
    throw LookupError("weight table has no entry for pose (" + std::to_string(pose.d_azimuth) +
                      "," + std::to_string(pose.d_elevation) + ")");
  }
  return it->second;
}

double WeightTable::lambda(RelativePose pose) const { return entry(pose).lambda; }

bool WeightTable::covers(const GridSpec& grid) const {
  const auto poses = realisable_poses(grid);
  return std::all_of(poses.begin(), poses.end(),
                     [&](const RelativePose& p) { return entries_.contains(p); });
}

void save_weight_table(const WeightTable& table, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
  out << "d_azimuth,d_elevation,mean_cross_entropy,lambda\n";
  for (const auto& [pose, e] : table.entries()) {
    out << pose.d_azimuth << ',' << pose.d_elevation << ','
        << csv::format_exact(e.mean_cross_entropy) << ',' << csv::format_exact(e.lambda)
        << '\n';
  }
  if (!out) throw std::runtime_error("failed writing '" + path.string() + "'");
}

WeightTable load_weight_table(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open weight table '" + path.string() + "'");
  std::string line;
  if (!std::getline(in, line) || csv::split(line) != std::vector<std::string_view>{
                                     "d_azimuth", "d_elevation", "mean_cross_entropy", "lambda"}) {
    throw ParseError(csv::location(1) +
                     ": expected header d_azimuth,d_elevation,mean_cross_entropy,lambda");
  }
  std::map<RelativePose, WeightTable::Entry> entries;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    const auto f = csv::split(line);
    if (f.size() != 4) throw ParseError(csv::location(line_no) + ": expected 4 fields");
    const RelativePose pose{static_cast<int>(csv::parse_int(f[0], line_no, "d_azimuth")),
                            static_cast<int>(csv::parse_int(f[1], line_no, "d_elevation"))};
    const WeightTable::Entry e{csv::parse_double(f[2], line_no, "mean_cross_entropy"),
                               csv::parse_double(f[3], line_no, "lambda")};
    if (!(e.lambda >= 0.0) || !std::isfinite(e.lambda)) {
      throw ParseError(csv::location(line_no) + ": lambda must be finite and non-negative");
    }
    if (!entries.emplace(pose, e).second) {
      throw ParseError(csv::location(line_no) + ": duplicate pose");
    }
  }
  return WeightTable(std::move(entries));
}

std::vector<WeightSample> sample_weight_pairs(const ClassifierOracle& oracle,
                                              std::span<const ObjectRef> training,
                                              const WeightLearningOptions& options,
                                              std::uint64_t seed) {
  require(!training.empty(), "learn_weights: need at least one training object");
  require(options.samples_per_pose >= 0, "learn_weights: samples_per_pose must be >= 0");
  const GridSpec& grid = oracle.grid();
  Rng rng = make_rng(seed, {stream::kWeights});
  std::uniform_int_distribution<std::size_t> pick_object(0, training.size() - 1);

  std::vector<WeightSample> samples;
  for (const RelativePose& pose : realisable_poses(grid)) {
    std::vector<ViewIndex> origins;
    for (const ViewIndex& v : all_views(grid))
      if (apply_pose(grid, v, pose)) origins.push_back(v);
    std::uniform_int_distribution<std::size_t> pick_origin(0, origins.size() - 1);
    for (int s = 0; s < options.samples_per_pose; ++s) {
      const ObjectRef& obj = training[pick_object(rng)];
      const ViewIndex a = origins[pick_origin(rng)];
      const ViewIndex b = *apply_pose(grid, a, pose);
      Observation oa = oracle.observe(obj, a, rng);
      Observation ob = oracle.observe(obj, b, rng);
      samples.push_back({pose, obj, std::move(oa), std::move(ob)});
    }
  }
  return samples;
}

WeightTable learn_weights(const ClassifierOracle& oracle, std::span<const ObjectRef> training,
                          const WeightLearningOptions& options, std::uint64_t seed) {
  const auto samples = sample_weight_pairs(oracle, training, options, seed);
  std::map<RelativePose, std::pair<double, int>> totals;
  for (const RelativePose& pose : realisable_poses(oracle.grid())) totals[pose] = {0.0, 0};
  for (const WeightSample& s : samples) {
    auto& [sum, count] = totals[s.pose];
    sum += cross_entropy(oracle.pair_posterior(s.first, s.second), s.object.label);
    ++count;
  }
  std::map<RelativePose, double> mean_ce;
  std::string missing;
  for (const auto& [pose, t] : totals) {
    if (t.second < options.min_samples || t.second == 0) {
      missing += " (" + std::to_string(pose.d_azimuth) + "," +
                 std::to_string(pose.d_elevation) + ")";
      continue;
    }
    mean_ce[pose] = t.first / t.second;
  }
  if (!missing.empty()) {
    throw CoverageError("too few training pairs (< " + std::to_string(options.min_samples) +
                        ") for poses:" + missing);
  }
  return WeightTable::from_cross_entropy(mean_ce, options.beta);
}

// -------------------------------------------------------------------------

std::string to_string(FusionVariant variant) {
  std::string s = variant.selection == PairSelection::All ? "all" : "best";
  return s + (variant.weighted ? "-weighted" : "-unweighted");
}

std::vector<IndexPair> select_pairs(const GridSpec& grid, std::span<const ViewIndex> views,
                                    std::span<const IndexPair> pairs,
                                    const WeightTable* weights, PairSelection mode) {
  if (mode == PairSelection::All) return {pairs.begin(), pairs.end()};
  require(weights != nullptr, "select_pairs: Best selection requires a weight table");
  const std::size_t keep = std::min(views.size(), pairs.size());
  std::vector<std::pair<double, IndexPair>> ranked;
  ranked.reserve(pairs.size());
  for (const IndexPair& p : pairs) {
    require(p.first < views.size() && p.second < views.size(),
            "select_pairs: pair index outside the sequence");
    ranked.emplace_back(weights->lambda(relative_pose(grid, views[p.first], views[p.second])), p);
  }
  std::stable_sort(ranked.begin(), ranked.end(), [](const auto& x, const auto& y) {
    if (x.first != y.first) return x.first > y.first;
    return x.second < y.second;
  });
  std::vector<IndexPair> out;
  out.reserve(keep);
  for (std::size_t i = 0; i < keep; ++i) out.push_back(ranked[i].second);
  return out;
}

ClassDistribution fuse(std::span<const ClassDistribution> pair_distributions,
                       std::span<const RelativePose> pair_poses, const WeightTable* weights) {
  require(!pair_distributions.empty(), "fuse: need at least one pair distribution");
  require(pair_distributions.size() == pair_poses.size(),
          "fuse: distributions and poses must have equal length");
  const std::size_t k = pair_distributions.front().size();
  const double uniform_weight = 1.0 / static_cast<double>(pair_distributions.size());
  std::vector<double> f(k, 0.0);
  double total_weight = 0.0;
  for (std::size_t i = 0; i < pair_distributions.size(); ++i) {
    require(pair_distributions[i].size() == k, "fuse: class count mismatch");
    const double w = weights ? weights->lambda(pair_poses[i]) : uniform_weight;
    total_weight += w;
    for (std::size_t c = 0; c < k; ++c) f[c] += w * pair_distributions[i][c];
  }
  if (!(total_weight > 0.0)) return ClassDistribution::uniform(k);
  ClassDistribution out{std::move(f)};
  double mass = 0.0;
  for (double p : out.probs) mass += p;
  for (double& p : out.probs) p /= mass;
  return out;
}

// -------------------------------------------------------------------------

void SequenceRecord::append(Observation obs) {
  const std::size_t j = observations_.size();
  single_dists_.push_back(oracle_->single_posterior(obs));
  observations_.push_back(std::move(obs));
  for (std::size_t i = 0; i < j; ++i) {
    pairs_.push_back({i, j});
    pair_dists_.push_back(oracle_->pair_posterior(observations_[i], observations_[j]));
    pair_poses_.push_back(relative_pose(oracle_->grid(), observations_[i].view,
                                        observations_[j].view));
  }
}

std::vector<ViewIndex> SequenceRecord::views() const {
  std::vector<ViewIndex> v;
  v.reserve(observations_.size());
  for (const Observation& o : observations_) v.push_back(o.view);
  return v;
}

Classification SequenceRecord::classify(const WeightTable* weights, FusionVariant variant,
                                        std::size_t prefix) const {
  if (prefix == 0) prefix = observations_.size();
  require(prefix >= 1 && prefix <= observations_.size(),
          "classify: prefix outside the recorded sequence");
  if (prefix == 1) {
    const ClassDistribution& d = single_dists_.front();
    return {d.argmax(), d};
  }
  // Pairs are stored in arrival order; the first prefix*(prefix-1)/2 belong
  // to the prefix. Reorder them to (first, second).
  const std::size_t n = prefix * (prefix - 1) / 2;
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return pairs_[a] < pairs_[b]; });

  std::vector<IndexPair> candidates;
  candidates.reserve(n);
  for (std::size_t idx : order) candidates.push_back(pairs_[idx]);
  const std::vector<ViewIndex> seq_views = [&] {
    auto all = views();
    all.resize(prefix);
    return all;
  }();
  const auto chosen =
      select_pairs(oracle_->grid(), seq_views, candidates, weights, variant.selection);

  std::vector<ClassDistribution> dists;
  std::vector<RelativePose> poses;
  dists.reserve(chosen.size());
  poses.reserve(chosen.size());
  for (const IndexPair& p : chosen) {
    // Arrival index of pair (i, j) is j(j-1)/2 + i.
    const std::size_t idx = p.second * (p.second - 1) / 2 + p.first;
    dists.push_back(pair_dists_[idx]);
    poses.push_back(pair_poses_[idx]);
  }
  ClassDistribution fused = fuse(dists, poses, variant.weighted ? weights : nullptr);
  return {fused.argmax(), std::move(fused)};
}

Label SequenceRecord::vote(std::size_t prefix) const {
  if (prefix == 0) prefix = observations_.size();
  require(prefix >= 1 && prefix <= observations_.size(),
          "vote: prefix outside the recorded sequence");
  std::vector<double> mean(single_dists_.front().size(), 0.0);
  for (std::size_t i = 0; i < prefix; ++i)
    for (std::size_t c = 0; c < mean.size(); ++c) mean[c] += single_dists_[i][c];
  return ClassDistribution{std::move(mean)}.argmax();
}

Classification classify_sequence(const ClassifierOracle& oracle, const WeightTable* weights,
                                 std::span<const Observation> observations,
                                 FusionVariant variant) {
  require(!observations.empty(), "classify_sequence: need at least one observation");
  SequenceRecord record(oracle);
  for (const Observation& o : observations) record.append(o);
  return record.classify(weights, variant);
}

Label vote_views(const ClassifierOracle& oracle, std::span<const Observation> observations) {
  require(!observations.empty(), "vote_views: need at least one observation");
  std::vector<double> mean(static_cast<std::size_t>(oracle.num_classes()), 0.0);
  for (const Observation& o : observations) {
    const ClassDistribution d = oracle.single_posterior(o);
    for (std::size_t c = 0; c < mean.size(); ++c) mean[c] += d[c];
  }
  return ClassDistribution{std::move(mean)}.argmax();
}

}  // namespace viewpair

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

#include "viewpair/csv.hpp"
#include "viewpair/errors.hpp"
#include "viewpair/policy.hpp"

namespace viewpair {

SignatureBank::SignatureBank(const ClassifierOracle& oracle)
    : grid_(oracle.grid()), num_classes_(oracle.num_classes()) {
  for (Label c = 0; c < num_classes_; ++c) {
    for (const ViewIndex& v : all_views(grid_)) {
      const Observation p = oracle.prototype(c, v);
      if (width_ == 0) width_ = p.features.size();
      require(p.features.size() == width_, "SignatureBank: prototype width mismatch");
      prototypes_.insert(prototypes_.end(), p.features.begin(), p.features.end());
    }
  }
}

std::span<const double> SignatureBank::prototype(Label label, ViewIndex v) const {
  const auto offset = (static_cast<std::size_t>(label) * static_cast<std::size_t>(grid_.size()) +
                       static_cast<std::size_t>(grid_.linear(v))) * width_;
  return {prototypes_.data() + offset, width_};
}

Label SignatureBank::dispatch(const Observation& obs) const {
  require(grid_.contains(obs.view), "dispatch: observation view outside grid");
  require(obs.features.size() == width_, "dispatch: observation width mismatch");
  Label best = 0;
  double best_dist = std::numeric_limits<double>::infinity();
  for (Label c = 0; c < num_classes_; ++c) {
    const auto p = prototype(c, obs.view);
    double d = 0.0;
    for (std::size_t j = 0; j < width_; ++j) {
      const double r = obs.features[j] - p[j];
      d += r * r;
    }
    // NaN distances (from infinite score entries) never win.
    if (d < best_dist) {
      best_dist = d;
      best = c;
    }
  }
  return best;
}

// -------------------------------------------------------------------------

NbvPolicy::NbvPolicy(const ClassifierOracle& oracle)
    : grid_(oracle.grid()), num_classes_(oracle.num_classes()), bank_(oracle) {
  const auto n = static_cast<std::size_t>(grid_.size());
  const auto views = all_views(grid_);
  scores_.assign(static_cast<std::size_t>(num_classes_) * n * n, -1.0);
  best_.resize(static_cast<std::size_t>(num_classes_) * n);
  for (Label c = 0; c < num_classes_; ++c) {
    for (const ViewIndex& v : views) {
      const Observation a = oracle.prototype(c, v);
      const std::size_t base = cell(c, v) * n;
      std::optional<ViewIndex> best;
      for (const ViewIndex& t : views) {
        if (t == v) continue;
        const ClassDistribution d = oracle.pair_posterior(a, oracle.prototype(c, t));
        scores_[base + static_cast<std::size_t>(grid_.linear(t))] = d[static_cast<std::size_t>(c)];
        if (!best || better(c, v, t, *best)) best = t;
      }
      // A one-view grid has no partner; stay put.
      best_[cell(c, v)] = best ? relative_pose(grid_, v, *best) : RelativePose{};
    }
  }
}

std::size_t NbvPolicy::cell(Label label, ViewIndex v) const {
  require(label >= 0 && label < num_classes_, "NbvPolicy: class out of range");
  require(grid_.contains(v), "NbvPolicy: view outside grid");
  return static_cast<std::size_t>(label) * static_cast<std::size_t>(grid_.size()) +
         static_cast<std::size_t>(grid_.linear(v));
}

bool NbvPolicy::better(Label label, ViewIndex from, ViewIndex a, ViewIndex b) const {
  const double sa = partner_score(label, from, a);
  const double sb = partner_score(label, from, b);
  if (sa != sb) return sa > sb;
  return relative_pose(grid_, from, a) < relative_pose(grid_, from, b);
}

RelativePose NbvPolicy::best_pose(Label label, ViewIndex v) const { return best_[cell(label, v)]; }

double NbvPolicy::partner_score(Label label, ViewIndex v, ViewIndex target) const {
  require(grid_.contains(target), "NbvPolicy: target outside grid");
  return scores_[cell(label, v) * static_cast<std::size_t>(grid_.size()) +
                 static_cast<std::size_t>(grid_.linear(target))];
}

std::vector<NbvTarget> NbvPolicy::targets() const {
  std::vector<NbvTarget> out;
  for (Label c = 0; c < num_classes_; ++c)
    for (const ViewIndex& v : all_views(grid_)) out.push_back({c, v, best_pose(c, v)});
  return out;
}

std::optional<ViewIndex> NbvPolicy::next(const Observation& obs, NbvMode mode,
                                         std::span<const ViewIndex> visited) const {
  std::vector<char> seen(static_cast<std::size_t>(grid_.size()), 0);
  for (const ViewIndex& v : visited) {
    require(grid_.contains(v), "nbv_next: visited view outside grid");
    seen[static_cast<std::size_t>(grid_.linear(v))] = 1;
  }
  require(grid_.contains(obs.view) && seen[static_cast<std::size_t>(grid_.linear(obs.view))],
          "nbv_next: the observed view must be among the visited views");
  const auto unvisited = [&](ViewIndex v) {
    return seen[static_cast<std::size_t>(grid_.linear(v))] == 0;
  };

  const Label label = bank_.dispatch(obs);
  const auto best_of = [&](const std::vector<ViewIndex>& candidates) {
    std::optional<ViewIndex> best;
    for (const ViewIndex& t : candidates) {
      if (!unvisited(t)) continue;
      if (!best || better(label, obs.view, t, *best)) best = t;
    }
    return best;
  };

  if (mode == NbvMode::Global) {
    const auto target = apply_pose(grid_, obs.view, best_pose(label, obs.view));
    if (target && unvisited(*target)) return target;
  } else {
    if (auto t = best_of(neighbors(grid_, obs.view))) return t;
  }
  return best_of(all_views(grid_));
}

std::vector<NbvTarget> build_nbv_targets(const ClassifierOracle& oracle) {
  return NbvPolicy(oracle).targets();
}

std::optional<ViewIndex> nbv_next(const NbvPolicy& policy, const Observation& obs,
                                  NbvMode mode, std::span<const ViewIndex> visited) {
  return policy.next(obs, mode, visited);
}

void save_nbv_policy(const NbvPolicy& policy, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
  out << "class,azimuth,elevation,best_d_azimuth,best_d_elevation\n";
  for (const NbvTarget& t : policy.targets()) {
    out << t.label << ',' << t.view.azimuth << ',' << t.view.elevation << ','
        << t.best.d_azimuth << ',' << t.best.d_elevation << '\n';
  }
  if (!out) throw std::runtime_error("failed writing '" + path.string() + "'");
}

// -------------------------------------------------------------------------

QualityPredictor::QualityPredictor(const ClassifierOracle& oracle, std::vector<double> table)
    : grid_(oracle.grid()), num_classes_(oracle.num_classes()), bank_(oracle),
      table_(std::move(table)) {
  const auto n = static_cast<std::size_t>(grid_.size());
  require(table_.size() == static_cast<std::size_t>(num_classes_) * n * n,
          "QualityPredictor: table size mismatch");
  for (double h : table_) {
    require(h >= 0.0 && std::isfinite(h), "QualityPredictor: predictions must be finite and >= 0");
  }
}

std::span<const double> QualityPredictor::row(Label label, ViewIndex v) const {
  require(label >= 0 && label < num_classes_, "QualityPredictor: class out of range");
  require(grid_.contains(v), "QualityPredictor: view outside grid");
  const auto n = static_cast<std::size_t>(grid_.size());
  const auto offset =
      (static_cast<std::size_t>(label) * n + static_cast<std::size_t>(grid_.linear(v))) * n;
  return {table_.data() + offset, n};
}

double QualityPredictor::h_hat(Label label, ViewIndex v, ViewIndex target) const {
  require(grid_.contains(target), "QualityPredictor: target outside grid");
  return row(label, v)[static_cast<std::size_t>(grid_.linear(target))];
}

std::span<const double> QualityPredictor::predict(const Observation& obs) const {
  return row(bank_.dispatch(obs), obs.view);
}

QualityPredictor fit_quality_predictor(const ClassifierOracle& oracle,
                                       std::span<const ObjectRef> training,
                                       int samples_per_cell, std::uint64_t seed) {
  require(samples_per_cell >= 1, "fit_quality_predictor: need at least one sample per cell");
  const int k = oracle.num_classes();
  std::vector<std::vector<ObjectRef>> by_class(static_cast<std::size_t>(k));
  for (const ObjectRef& o : training) {
    require(o.label >= 0 && o.label < k, "fit_quality_predictor: object class out of range");
    by_class[static_cast<std::size_t>(o.label)].push_back(o);
  }
  for (Label c = 0; c < k; ++c) {
    require(!by_class[static_cast<std::size_t>(c)].empty(),
            "fit_quality_predictor: every class needs a training object");
  }

  const GridSpec& grid = oracle.grid();
  const auto views = all_views(grid);
  const auto n = views.size();
  std::vector<double> table(static_cast<std::size_t>(k) * n * n);
  for (Label c = 0; c < k; ++c) {
    const auto& objects = by_class[static_cast<std::size_t>(c)];
    for (std::size_t vi = 0; vi < n; ++vi) {
      for (std::size_t ti = 0; ti < n; ++ti) {
        Rng rng = make_rng(seed, {stream::kQuality, static_cast<std::uint64_t>(c), vi, ti});
        double total = 0.0;
        for (int s = 0; s < samples_per_cell; ++s) {
          const ObjectRef& obj = objects[static_cast<std::size_t>(s) % objects.size()];
          const Observation a = oracle.observe(obj, views[vi], rng);
          const Observation b = oracle.observe(obj, views[ti], rng);
          total += cross_entropy(oracle.pair_posterior(a, b), c);
        }
        table[(static_cast<std::size_t>(c) * n + vi) * n + ti] = total / samples_per_cell;
      }
    }
  }
  return QualityPredictor(oracle, std::move(table));
}

void save_quality_predictor(const QualityPredictor& predictor,
                            const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
  out << "class,azimuth,elevation,target_azimuth,target_elevation,h_hat\n";
  const auto views = all_views(predictor.grid());
  for (Label c = 0; c < predictor.num_classes(); ++c) {
    for (const ViewIndex& v : views) {
      for (const ViewIndex& t : views) {
        out << c << ',' << v.azimuth << ',' << v.elevation << ',' << t.azimuth << ','
            << t.elevation << ',' << csv::format_exact(predictor.h_hat(c, v, t)) << '\n';
      }
    }
  }
  if (!out) throw std::runtime_error("failed writing '" + path.string() + "'");
}

}  // namespace viewpair

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

#include <json.hpp>

#include "viewpair/errors.hpp"
#include "viewpair/harness.hpp"

namespace viewpair {

using nlohmann::json;

std::vector<double> ambiguity_values(const AmbiguityProfile& profile, const GridSpec& grid,
                                     std::uint64_t seed) {
  const auto n = static_cast<std::size_t>(grid.size());
  if (profile.kind == "constant") return std::vector<double>(n, profile.value);
  if (profile.kind == "table") {
    if (profile.values.size() != n) {
      throw ConfigError("ambiguity table needs " + std::to_string(n) + " values, got " +
                        std::to_string(profile.values.size()));
    }
    return profile.values;
  }
  if (profile.kind != "harmonic") throw ConfigError("unknown ambiguity kind '" + profile.kind + "'");

  // One azimuth harmonic with a seeded phase plus a seeded elevation tilt.
  Rng rng = make_rng(seed, {stream::kAmbiguity});
  std::uniform_real_distribution<double> phase_dist(0.0, 2.0 * std::numbers::pi);
  const double phase = phase_dist(rng);
  const double tilt = std::bernoulli_distribution(0.5)(rng) ? 1.0 : -1.0;
  const double half = (grid.elevation_steps - 1) / 2.0;
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    const ViewIndex v = grid.view_at(static_cast<int>(i));
    const double theta = 2.0 * std::numbers::pi * v.azimuth / grid.azimuth_steps;
    const double elev = half > 0 ? (v.elevation - half) / half : 0.0;
    const double s = 0.6 * std::cos(theta - phase) + 0.4 * tilt * elev;
    out[i] = std::clamp(profile.mean + profile.amplitude * s, 0.0, 1.0);
  }
  return out;
}

std::string Method::name() const { return fusion ? to_string(*fusion) : "vote"; }

std::optional<Method> Method::parse(std::string_view name) {
  if (name == "vote") return Method{};
  for (PairSelection sel : {PairSelection::All, PairSelection::Best}) {
    for (bool weighted : {true, false}) {
      const FusionVariant f{sel, weighted};
      if (to_string(f) == name) return Method{f};
    }
  }
  return std::nullopt;
}

void BenchConfig::validate() const {
  try {
    grid.validate();
  } catch (const ContractViolation& e) {
    throw ConfigError(std::string("grid: ") + e.what());
  }
  if (world.num_classes < 2) throw ConfigError("world.num_classes must be at least 2");
  if (world.feature_dim < 1) throw ConfigError("world.feature_dim must be at least 1");
  if (!(world.noise_sigma >= 0.0) || !std::isfinite(world.noise_sigma))
    throw ConfigError("world.noise_sigma must be finite and non-negative");
  if (world.train_objects_per_class < 1 || world.test_objects_per_class < 1)
    throw ConfigError("world object counts must be at least 1 per class");
  if (world.ambiguity.kind == "constant" &&
      !(world.ambiguity.value >= 0.0 && world.ambiguity.value <= 1.0))
    throw ConfigError("world.ambiguity.value must lie in [0, 1]");
  for (double a : world.ambiguity.values)
    if (!(a >= 0.0 && a <= 1.0)) throw ConfigError("world.ambiguity.values must lie in [0, 1]");
  (void)ambiguity_values(world.ambiguity, grid, 0);
  if (lengths.empty()) throw ConfigError("lengths must not be empty");
  for (int m : lengths) {
    if (m < 1) throw ConfigError("every sequence length must be at least 1");
    if (m > grid.size()) throw ConfigError("sequence length exceeds the number of grid views");
  }
  if (ablation_length < 1 || ablation_length > grid.size())
    throw ConfigError("ablation_length must lie in [1, grid size]");
  if (strategies.empty()) throw ConfigError("strategies must not be empty");
  if (methods.empty()) throw ConfigError("methods must not be empty");
  if (!(beta >= 0.0) || !std::isfinite(beta)) throw ConfigError("beta must be finite and >= 0");
  if (training.samples_per_pose < training.min_samples)
    throw ConfigError("training.samples_per_pose must be at least training.min_samples");
  if (training.min_samples < 1) throw ConfigError("training.min_samples must be at least 1");
  if (training.quality_samples < 1) throw ConfigError("training.quality_samples must be >= 1");
  if (horizon_cap < 0 || horizon_cap > 8) throw ConfigError("horizon_cap must lie in [0, 8]");
  if (seeds.empty()) throw ConfigError("seeds must not be empty");
  if (jobs < 1) throw ConfigError("jobs must be at least 1");
}

namespace {

void check_keys(const json& j, const std::string& where, std::initializer_list<const char*> keys) {
  if (!j.is_object()) throw ConfigError(where + " must be a JSON object");
  const std::set<std::string> allowed(keys.begin(), keys.end());
  for (const auto& [k, _] : j.items()) {
    if (!allowed.contains(k)) throw ConfigError("unknown key '" + k + "' in " + where);
  }
}

template <typename T>
void read(const json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

}  // namespace

BenchConfig config_from_json_text(const std::string& text) {
  BenchConfig c;
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  try {
    check_keys(j, "config",
               {"grid", "world", "lengths", "strategies", "methods", "beta", "training",
                "horizon_cap", "ablation_length", "seeds", "out_dir", "jobs", "scores"});
    if (j.contains("grid")) {
      const json& g = j["grid"];
      check_keys(g, "grid", {"azimuth_steps", "elevation_steps"});
      read(g, "azimuth_steps", c.grid.azimuth_steps);
      read(g, "elevation_steps", c.grid.elevation_steps);
    }
    if (j.contains("world")) {
      const json& w = j["world"];
      check_keys(w, "world",
                 {"num_classes", "feature_dim", "noise_sigma", "ambiguity",
                  "train_objects_per_class", "test_objects_per_class"});
      read(w, "num_classes", c.world.num_classes);
      read(w, "feature_dim", c.world.feature_dim);
      read(w, "noise_sigma", c.world.noise_sigma);
      read(w, "train_objects_per_class", c.world.train_objects_per_class);
      read(w, "test_objects_per_class", c.world.test_objects_per_class);
      if (w.contains("ambiguity")) {
        const json& a = w["ambiguity"];
        check_keys(a, "world.ambiguity", {"kind", "value", "mean", "amplitude", "values"});
        read(a, "kind", c.world.ambiguity.kind);
        read(a, "value", c.world.ambiguity.value);
        read(a, "mean", c.world.ambiguity.mean);
        read(a, "amplitude", c.world.ambiguity.amplitude);
        read(a, "values", c.world.ambiguity.values);
      }
    }
    read(j, "lengths", c.lengths);
    if (j.contains("strategies")) {
      c.strategies.clear();
      for (const auto& s : j["strategies"]) {
        const auto parsed = parse_strategy(s.get<std::string>());
        if (!parsed) throw ConfigError("unknown strategy '" + s.get<std::string>() + "'");
        c.strategies.push_back(*parsed);
      }
    }
    if (j.contains("methods")) {
      c.methods.clear();
      for (const auto& m : j["methods"]) {
        const auto parsed = Method::parse(m.get<std::string>());
        if (!parsed) throw ConfigError("unknown method '" + m.get<std::string>() + "'");
        c.methods.push_back(*parsed);
      }
    }
    read(j, "beta", c.beta);
    if (j.contains("training")) {
      const json& t = j["training"];
      check_keys(t, "training", {"samples_per_pose", "min_samples", "quality_samples"});
      read(t, "samples_per_pose", c.training.samples_per_pose);
      read(t, "min_samples", c.training.min_samples);
      read(t, "quality_samples", c.training.quality_samples);
    }
    read(j, "horizon_cap", c.horizon_cap);
    read(j, "ablation_length", c.ablation_length);
    read(j, "seeds", c.seeds);
    read(j, "out_dir", c.out_dir);
    read(j, "jobs", c.jobs);
    if (j.contains("scores")) c.scores_path = j["scores"].get<std::string>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config has a wrongly typed value: ") + e.what());
  }
  c.validate();
  return c;
}

BenchConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config '" + path.string() + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return config_from_json_text(buf.str());
}

std::string config_to_json_text(const BenchConfig& c) {
  json j;
  j["grid"] = {{"azimuth_steps", c.grid.azimuth_steps},
               {"elevation_steps", c.grid.elevation_steps}};
  json amb = {{"kind", c.world.ambiguity.kind}};
  if (c.world.ambiguity.kind == "constant") amb["value"] = c.world.ambiguity.value;
  if (c.world.ambiguity.kind == "harmonic") {
    amb["mean"] = c.world.ambiguity.mean;
    amb["amplitude"] = c.world.ambiguity.amplitude;
  }
  if (c.world.ambiguity.kind == "table") amb["values"] = c.world.ambiguity.values;
  j["world"] = {{"num_classes", c.world.num_classes},
                {"feature_dim", c.world.feature_dim},
                {"noise_sigma", c.world.noise_sigma},
                {"ambiguity", amb},
                {"train_objects_per_class", c.world.train_objects_per_class},
                {"test_objects_per_class", c.world.test_objects_per_class}};
  j["lengths"] = c.lengths;
  j["strategies"] = json::array();
  for (Strategy s : c.strategies) j["strategies"].push_back(to_string(s));
  j["methods"] = json::array();
  for (const Method& m : c.methods) j["methods"].push_back(m.name());
  j["beta"] = c.beta;
  j["training"] = {{"samples_per_pose", c.training.samples_per_pose},
                   {"min_samples", c.training.min_samples},
                   {"quality_samples", c.training.quality_samples}};
  j["horizon_cap"] = c.horizon_cap;
  j["ablation_length"] = c.ablation_length;
  j["seeds"] = c.seeds;
  j["out_dir"] = c.out_dir;
  j["jobs"] = c.jobs;
  if (c.scores_path) j["scores"] = *c.scores_path;
  return j.dump(2) + "\n";
}

}  // namespace viewpair

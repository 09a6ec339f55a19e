#include <fstream>
#include <numeric>

#include "viewpair/csv.hpp"
#include "viewpair/errors.hpp"
#include "viewpair/sensorium.hpp"

namespace viewpair {

ScoreTable::ScoreTable(GridSpec grid, int num_classes)
    : grid_(grid), num_classes_(num_classes) {
  grid_.validate();
  require(num_classes >= 2, "ScoreTable: need at least 2 classes");
}

std::size_t ScoreTable::add_object(const std::string& id, Label true_class) {
  require(true_class >= 0 && true_class < num_classes_, "ScoreTable: class out of range");
  require(!id.empty() && id.find(',') == std::string::npos,
          "ScoreTable: object ids must be non-empty and comma-free");
  if (auto it = index_.find(id); it != index_.end()) {
    require(labels_[it->second] == true_class,
            "ScoreTable: object '" + id + "' listed with two different classes");
    return it->second;
  }
  const std::size_t idx = ids_.size();
  ids_.push_back(id);
  labels_.push_back(true_class);
  index_.emplace(id, idx);
  const auto cells = static_cast<std::size_t>(grid_.size());
  scores_.resize(scores_.size() + cells * static_cast<std::size_t>(num_classes_), 0.0);
  populated_.resize(populated_.size() + cells, 0);
  return idx;
}

std::size_t ScoreTable::cell(std::size_t object, ViewIndex v) const {
  if (object >= ids_.size()) throw LookupError("ScoreTable: unknown object index");
  if (!grid_.contains(v)) throw LookupError("ScoreTable: view outside grid");
  return object * static_cast<std::size_t>(grid_.size()) +
         static_cast<std::size_t>(grid_.linear(v));
}

void ScoreTable::set_scores(std::size_t object, ViewIndex v, std::span<const double> scores) {
  require(scores.size() == static_cast<std::size_t>(num_classes_),
          "ScoreTable: score vector width must equal the class count");
  const std::size_t c = cell(object, v);
  std::copy(scores.begin(), scores.end(),
            scores_.begin() + static_cast<std::ptrdiff_t>(c * static_cast<std::size_t>(num_classes_)));
  populated_[c] = 1;
}

std::size_t ScoreTable::object_index(const std::string& id) const {
  auto it = index_.find(id);
  if (it == index_.end()) throw LookupError("ScoreTable: unknown object '" + id + "'");
  return it->second;
}

bool ScoreTable::has_cell(std::size_t object, ViewIndex v) const {
  return populated_[cell(object, v)] != 0;
}

std::span<const double> ScoreTable::scores(std::size_t object, ViewIndex v) const {
  const std::size_t c = cell(object, v);
  if (!populated_[c]) {
    throw LookupError("ScoreTable: no scores for object '" + ids_[object] + "' at view (" +
                      std::to_string(v.azimuth) + "," + std::to_string(v.elevation) + ")");
  }
  return {scores_.data() + c * static_cast<std::size_t>(num_classes_),
          static_cast<std::size_t>(num_classes_)};
}

void ScoreTable::validate_complete() const {
  if (ids_.empty()) throw CompletenessError("score table contains no objects");
  for (std::size_t o = 0; o < ids_.size(); ++o) {
    for (const ViewIndex& v : all_views(grid_)) {
      if (!populated_[cell(o, v)]) {
        throw CompletenessError("score table missing cell: object '" + ids_[o] +
                                "' view (" + std::to_string(v.azimuth) + "," +
                                std::to_string(v.elevation) + ")");
      }
    }
  }
}

void save_score_table(const ScoreTable& table, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
  out << "object_id,true_class,azimuth,elevation";
  for (int k = 0; k < table.num_classes(); ++k) out << ",s" << k;
  out << '\n';
  for (std::size_t o = 0; o < table.num_objects(); ++o) {
    for (const ViewIndex& v : all_views(table.grid())) {
      if (!table.has_cell(o, v)) continue;
      out << table.object_id(o) << ',' << table.true_class(o) << ',' << v.azimuth << ','
          << v.elevation;
      for (double s : table.scores(o, v)) out << ',' << csv::format_exact(s);
      out << '\n';
    }
  }
  if (!out) throw std::runtime_error("failed writing '" + path.string() + "'");
}

ScoreTable load_score_table(const std::filesystem::path& path, const GridSpec& grid) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open score table '" + path.string() + "'");
  std::string line;
  if (!std::getline(in, line)) throw ParseError(csv::location(1) + ": empty score table");
  const auto header = csv::split(line);
  static constexpr std::string_view kFixed[] = {"object_id", "true_class", "azimuth",
                                                "elevation"};
  if (header.size() < 6) {
    throw ParseError(csv::location(1) + ": header needs at least two score columns");
  }
  for (std::size_t i = 0; i < 4; ++i) {
    if (header[i] != kFixed[i]) {
      throw ParseError(csv::location(1) + ": expected column '" + std::string(kFixed[i]) +
                       "', found '" + std::string(header[i]) + "'");
    }
  }
  const int num_classes = static_cast<int>(header.size() - 4);
  for (int k = 0; k < num_classes; ++k) {
    if (header[static_cast<std::size_t>(4 + k)] != "s" + std::to_string(k)) {
      throw ParseError(csv::location(1) + ": expected column 's" + std::to_string(k) + "'");
    }
  }

  ScoreTable table(grid, num_classes);
  std::vector<double> scores(static_cast<std::size_t>(num_classes));
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    const auto fields = csv::split(line);
    if (fields.size() != header.size()) {
      throw ParseError(csv::location(line_no) + ": expected " + std::to_string(header.size()) +
                       " fields for K=" + std::to_string(num_classes) + ", found " +
                       std::to_string(fields.size()));
    }
    const std::string id(fields[0]);
    const auto label = csv::parse_int(fields[1], line_no, "true_class");
    const ViewIndex v{static_cast<int>(csv::parse_int(fields[2], line_no, "azimuth")),
                      static_cast<int>(csv::parse_int(fields[3], line_no, "elevation"))};
    if (label < 0 || label >= num_classes) {
      throw ParseError(csv::location(line_no) + ": true_class out of range");
    }
    if (!grid.contains(v)) throw ParseError(csv::location(line_no) + ": view outside grid");
    for (int k = 0; k < num_classes; ++k) {
      const auto col = static_cast<std::size_t>(4 + k);
      scores[static_cast<std::size_t>(k)] = csv::parse_double(fields[col], line_no, header[col]);
    }
    std::size_t object = 0;
    try {
      object = table.add_object(id, static_cast<Label>(label));
    } catch (const ContractViolation& e) {
      throw ParseError(csv::location(line_no) + ": " + e.what());
    }
    if (table.has_cell(object, v)) {
      throw ParseError(csv::location(line_no) + ": duplicate row for object '" + id + "'");
    }
    table.set_scores(object, v, scores);
  }
  table.validate_complete();
  return table;
}

ClassDistribution posterior_from_scores(const ScoreTable& table, const std::string& object,
                                        std::span<const ViewIndex> views) {
  require(!views.empty(), "posterior_from_scores: need at least one view");
  const std::size_t o = table.object_index(object);
  std::vector<double> total(static_cast<std::size_t>(table.num_classes()), 0.0);
  for (const ViewIndex& v : views) {
    const auto s = table.scores(o, v);
    for (std::size_t k = 0; k < total.size(); ++k) total[k] += s[k];
  }
  return ClassDistribution::from_log_scores(total);
}

// -------------------------------------------------------------------------

ScoreTableOracle::ScoreTableOracle(const ScoreTable& table,
                                   std::span<const ObjectRef> prototype_objects)
    : table_(table) {
  const auto k = static_cast<std::size_t>(table.num_classes());
  const auto n = static_cast<std::size_t>(table.grid().size());
  prototypes_.assign(k * n * k, 0.0);
  std::vector<int> counts(k, 0);
  for (const ObjectRef& obj : prototype_objects) {
    require(obj.id < table.num_objects(), "ScoreTableOracle: prototype object out of range");
    const auto c = static_cast<std::size_t>(obj.label);
    ++counts[c];
    for (std::size_t v = 0; v < n; ++v) {
      const auto s = table.scores(obj.id, table.grid().view_at(static_cast<int>(v)));
      for (std::size_t j = 0; j < k; ++j) prototypes_[(c * n + v) * k + j] += s[j];
    }
  }
  for (std::size_t c = 0; c < k; ++c) {
    if (counts[c] == 0) continue;
    for (std::size_t i = 0; i < n * k; ++i) prototypes_[c * n * k + i] /= counts[c];
  }
}

Observation ScoreTableOracle::observe(const ObjectRef& object, ViewIndex v, Rng&) const {
  const auto s = table_.scores(object.id, v);
  return {{s.begin(), s.end()}, v};
}

Observation ScoreTableOracle::prototype(Label label, ViewIndex v) const {
  const auto k = static_cast<std::size_t>(table_.num_classes());
  const auto n = static_cast<std::size_t>(table_.grid().size());
  const auto offset =
      (static_cast<std::size_t>(label) * n + static_cast<std::size_t>(table_.grid().linear(v))) * k;
  return {{prototypes_.begin() + static_cast<std::ptrdiff_t>(offset),
           prototypes_.begin() + static_cast<std::ptrdiff_t>(offset + k)},
          v};
}

ClassDistribution ScoreTableOracle::single_posterior(const Observation& obs) const {
  return ClassDistribution::from_log_scores(obs.features);
}

ClassDistribution ScoreTableOracle::pair_posterior(const Observation& a,
                                                   const Observation& b) const {
  require(a.features.size() == b.features.size(), "pair_posterior: width mismatch");
  std::vector<double> total(a.features.size());
  for (std::size_t k = 0; k < total.size(); ++k) total[k] = a.features[k] + b.features[k];
  return ClassDistribution::from_log_scores(total);
}

}  // namespace viewpair

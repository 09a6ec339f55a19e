#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "viewpair/csv.hpp"
#include "viewpair/errors.hpp"
#include "viewpair/harness.hpp"

namespace viewpair {

void ResultsTable::add(const ResultKey& key, Tally tally) {
  Tally& cell = cells_[key];
  cell.correct += tally.correct;
  cell.total += tally.total;
}

const Tally& ResultsTable::at(const ResultKey& key) const {
  auto it = cells_.find(key);
  if (it == cells_.end()) {
    throw LookupError("no result for " + key.strategy + "/" + key.method + " length " +
                      std::to_string(key.length) + " seed " + std::to_string(key.seed));
  }
  return it->second;
}

std::vector<SummaryRow> ResultsTable::summarize() const {
  std::map<std::tuple<std::string, std::string, int>, std::vector<double>> groups;
  for (const auto& [key, tally] : cells_)
    groups[{key.strategy, key.method, key.length}].push_back(tally.accuracy());
  std::vector<SummaryRow> rows;
  for (const auto& [k, acc] : groups) {
    SummaryRow row{std::get<0>(k), std::get<1>(k), std::get<2>(k), acc.size(), 0.0, 0.0};
    for (double a : acc) row.mean += a;
    row.mean /= static_cast<double>(acc.size());
    if (acc.size() > 1) {
      double ss = 0.0;
      for (double a : acc) ss += (a - row.mean) * (a - row.mean);
      row.std_dev = std::sqrt(ss / static_cast<double>(acc.size() - 1));
    }
    rows.push_back(row);
  }
  return rows;
}

double ResultsTable::mean_accuracy(const std::string& strategy, const std::string& method,
                                   int length) const {
  for (const SummaryRow& r : summarize())
    if (r.strategy == strategy && r.method == method && r.length == length) return r.mean;
  throw LookupError("no results for " + strategy + "/" + method + " length " +
                    std::to_string(length));
}

std::string results_csv(const ResultsTable& table) {
  std::string out = "strategy,method,length,seed,correct,total,accuracy\n";
  for (const auto& [k, t] : table.cells()) {
    out += k.strategy + ',' + k.method + ',' + std::to_string(k.length) + ',' +
           std::to_string(k.seed) + ',' + std::to_string(t.correct) + ',' +
           std::to_string(t.total) + ',' + csv::format_fixed(t.accuracy(), 6) + '\n';
  }
  return out;
}

ResultsTable parse_results_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != "strategy,method,length,seed,correct,total,accuracy") {
    throw ParseError(csv::location(1) + ": unexpected results header");
  }
  ResultsTable table;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto f = csv::split(line);
    if (f.size() != 7) throw ParseError(csv::location(line_no) + ": expected 7 fields");
    ResultKey key{std::string(f[0]), std::string(f[1]),
                  static_cast<int>(csv::parse_int(f[2], line_no, "length")),
                  static_cast<std::uint64_t>(csv::parse_int(f[3], line_no, "seed"))};
    const Tally t{static_cast<std::size_t>(csv::parse_int(f[4], line_no, "correct")),
                  static_cast<std::size_t>(csv::parse_int(f[5], line_no, "total"))};
    if (t.correct > t.total) throw ParseError(csv::location(line_no) + ": correct > total");
    table.add(key, t);
  }
  return table;
}

std::string summary_csv(const ResultsTable& table) {
  std::string out = "strategy,method,length,seeds,mean_accuracy,std_accuracy\n";
  for (const SummaryRow& r : table.summarize()) {
    out += r.strategy + ',' + r.method + ',' + std::to_string(r.length) + ',' +
           std::to_string(r.seeds) + ',' + csv::format_fixed(r.mean, 6) + ',' +
           csv::format_fixed(r.std_dev, 6) + '\n';
  }
  return out;
}

std::string summary_markdown(const ResultsTable& table, const std::string& title) {
  const auto rows = table.summarize();
  std::set<int> lengths;
  std::map<std::pair<std::string, std::string>, std::map<int, const SummaryRow*>> grid;
  for (const SummaryRow& r : rows) {
    lengths.insert(r.length);
    grid[{r.method, r.strategy}][r.length] = &r;
  }
  std::string out = "### " + title + "\n\n| Method | View selection |";
  std::string rule = "|---|---|";
  for (int m : lengths) {
    out += " " + std::to_string(m) + " views |";
    rule += "---:|";
  }
  out += " Average |\n" + rule + "---:|\n";
  for (const auto& [key, cells] : grid) {
    out += "| " + key.first + " | " + key.second + " |";
    double sum = 0.0;
    for (int m : lengths) {
      auto it = cells.find(m);
      if (it == cells.end()) {
        out += " - |";
        continue;
      }
      sum += it->second->mean;
      out += " " + csv::format_fixed(100.0 * it->second->mean, 1) + " ± " +
             csv::format_fixed(100.0 * it->second->std_dev, 1) + " |";
    }
    out += " " + csv::format_fixed(100.0 * sum / static_cast<double>(cells.size()), 1) + " |\n";
  }
  return out;
}

void emit_results(const ResultsTable& table, OutputFormat format,
                  const std::filesystem::path& path, const std::string& title) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
  out << (format == OutputFormat::Csv ? results_csv(table) : summary_markdown(table, title));
  if (!out) throw std::runtime_error("failed writing '" + path.string() + "'");
}

}  // namespace viewpair

#pragma once

// Output tables: '#'-prefixed metadata lines, a column-name row, then
// comma-separated rows with 17 significant digits.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace sqt {

struct TimeSeries {
  std::string name;  // file stem
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
  std::vector<std::pair<std::string, std::string>> metadata;

  void add_row(std::vector<double> row) { rows.push_back(std::move(row)); }

  /// Column by name; throws if absent.
  std::vector<double> column(const std::string& col) const {
    for (std::size_t j = 0; j < columns.size(); ++j)
      if (columns[j] == col) {
        std::vector<double> out;
        out.reserve(rows.size());
        for (const auto& r : rows) out.push_back(r[j]);
        return out;
      }
    throw std::out_of_range("TimeSeries: no column '" + col + "' in " + name);
  }

  /// Rectangular and finite; throws std::logic_error otherwise.
  void validate() const {
    if (columns.empty()) throw std::logic_error(name + ": no columns");
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (rows[i].size() != columns.size())
        throw std::logic_error(name + ": row " + std::to_string(i) + " has wrong width");
      for (double v : rows[i])
        if (!std::isfinite(v)) throw std::logic_error(name + ": non-finite value in row " + std::to_string(i));
    }
  }
};

inline std::string format17(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline void write_csv(std::ostream& out, const TimeSeries& ts) {
  ts.validate();
  for (const auto& [k, v] : ts.metadata) out << "# " << k << " = " << v << '\n';
  for (std::size_t j = 0; j < ts.columns.size(); ++j) out << (j ? "," : "") << ts.columns[j];
  out << '\n';
  for (const auto& row : ts.rows) {
    for (std::size_t j = 0; j < row.size(); ++j) out << (j ? "," : "") << format17(row[j]);
    out << '\n';
  }
}

/// Plain gnuplot script drawing every column against the first.
inline void write_gnuplot(std::ostream& out, const TimeSeries& ts, const std::string& csv_file) {
  out << "set datafile separator ','\n"
      << "set key autotitle columnhead\n"
      << "set xlabel '" << ts.columns.front() << "'\n"
      << "set title '" << ts.name << "'\n"
      << "plot for [i=2:" << ts.columns.size() << "] '" << csv_file << "' using 1:i with lines\n"
      << "pause -1\n";
}

/// Writes <dir>/<name>.csv and <dir>/<name>.gp; returns the CSV path.
inline std::filesystem::path write_series(const std::filesystem::path& dir, const TimeSeries& ts) {
  std::filesystem::create_directories(dir);
  const auto csv = dir / (ts.name + ".csv");
  {
    std::ofstream f(csv, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + csv.string());
    write_csv(f, ts);
  }
  std::ofstream g(dir / (ts.name + ".gp"), std::ios::binary);
  if (!g) throw std::runtime_error("cannot write gnuplot script for " + ts.name);
  write_gnuplot(g, ts, csv.filename().string());
  return csv;
}

}  // namespace sqt

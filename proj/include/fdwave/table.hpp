#pragma once

// Comma-separated tables with a one-line header and a '#'-prefixed footer
// block.  All numbers are written with %.17g so reruns are byte-identical
// and round trips are lossless.

#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace fdwave {

inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<std::optional<double>>> rows;
  std::vector<std::pair<std::string, std::string>> footer;

  void add_row(std::vector<std::optional<double>> row) {
    if (row.size() != columns.size())
      throw std::invalid_argument("table row width does not match header");
    rows.push_back(std::move(row));
  }

  void add_footer(const std::string& key, double value) {
    footer.emplace_back(key, format_double(value));
  }

  void add_footer(const std::string& key, const std::string& value) {
    footer.emplace_back(key, value);
  }
};

inline std::string render_table(const Table& t) {
  if (t.columns.empty()) throw std::invalid_argument("render_table: no columns");
  std::ostringstream out;
  for (std::size_t i = 0; i < t.columns.size(); ++i)
    out << (i ? "," : "") << t.columns[i];
  out << "\n";
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out << ",";
      if (row[i]) out << format_double(*row[i]);
    }
    out << "\n";
  }
  for (const auto& [k, v] : t.footer) out << "# " << k << " = " << v << "\n";
  return out.str();
}

inline void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << content;
  if (!out) throw std::runtime_error("failed writing " + path);
}

inline void write_table(const std::string& path, const Table& t) {
  write_file(path, render_table(t));
}

}  // namespace fdwave

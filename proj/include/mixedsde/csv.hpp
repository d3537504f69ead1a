#pragma once

// CSV serialization for paths: header `t,x_1,...,x_d`, one row per node,
// full double precision (17 significant digits). Solution paths carry an
// optional `# stopped_at=<t>` metadata row ahead of the header.

#include <cstdio>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "mixedsde/grid.hpp"

namespace mixedsde {

namespace detail {

inline std::string format_full(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace detail

inline void write_csv(std::ostream& os, const SamplePath& path,
                      std::optional<double> stopped_at = std::nullopt) {
  if (stopped_at) os << "# stopped_at=" << detail::format_full(*stopped_at) << "\n";
  os << "t";
  for (std::size_t k = 1; k <= path.dim; ++k) os << ",x_" << k;
  os << "\n";
  for (std::size_t i = 0; i < path.grid.size(); ++i) {
    os << detail::format_full(path.grid[i]);
    for (std::size_t k = 0; k < path.dim; ++k) {
      os << "," << detail::format_full(path.at(i, k));
    }
    os << "\n";
  }
}

struct CsvPath {
  SamplePath path;
  std::optional<double> stopped_at;
};

inline CsvPath read_csv(std::istream& is) {
  std::optional<double> stopped_at;
  std::string line;
  bool saw_header = false;
  std::size_t dim = 0;
  std::vector<double> nodes;
  std::vector<double> values;

  while (std::getline(is, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      const auto pos = line.find("stopped_at=");
      if (pos != std::string::npos) stopped_at = std::stod(line.substr(pos + 11));
      continue;
    }
    if (!saw_header) {
      std::size_t commas = 0;
      for (char c : line) commas += (c == ',');
      if (commas == 0) throw std::runtime_error("read_csv: malformed header: " + line);
      dim = commas;
      saw_header = true;
      continue;
    }
    std::stringstream row(line);
    std::string cell;
    std::size_t col = 0;
    while (std::getline(row, cell, ',')) {
      const double v = std::stod(cell);
      if (col == 0) {
        nodes.push_back(v);
      } else {
        values.push_back(v);
      }
      ++col;
    }
    if (col != dim + 1) throw std::runtime_error("read_csv: ragged row: " + line);
  }
  if (!saw_header) throw std::runtime_error("read_csv: empty input");
  return CsvPath{SamplePath(TimeGrid(std::move(nodes)), dim, std::move(values)), stopped_at};
}

}  // namespace mixedsde

#pragma once

// Time grids and sampled vector paths. The grid is the universal carrier:
// drivers, solutions and all fractional-calculus operations live on it.
// Sampled functions are read as piecewise-linear interpolants of their node
// values throughout the library.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace mixedsde {

/// Hurst parameter, restricted to the H > 1/2 regime. H = 1/2 is admitted so
/// tests can check the Brownian reduction.
struct HurstParameter {
  double value;

  explicit HurstParameter(double h) : value(h) {
    if (!(h >= 0.5) || !(h < 1.0)) {
      throw std::invalid_argument("HurstParameter: need 0.5 <= h < 1, got " +
                                  std::to_string(h));
    }
  }
};

/// Strictly increasing nodes t0 = 0 < t1 < ... < tn = T. A grid with n cells
/// has n + 1 nodes; "level n" in studies always refers to the cell count.
/// The degenerate single-node grid {0} is allowed (constant paths).
class TimeGrid {
 public:
  explicit TimeGrid(std::vector<double> nodes) : nodes_(std::move(nodes)) {
    if (nodes_.empty()) throw std::invalid_argument("TimeGrid: no nodes");
    if (nodes_.front() != 0.0) {
      throw std::invalid_argument("TimeGrid: first node must be 0");
    }
    for (std::size_t i = 1; i < nodes_.size(); ++i) {
      if (!(nodes_[i] > nodes_[i - 1])) {
        throw std::invalid_argument("TimeGrid: nodes not strictly increasing at index " +
                                    std::to_string(i));
      }
      if (!std::isfinite(nodes_[i])) {
        throw std::invalid_argument("TimeGrid: non-finite node");
      }
    }
  }

  static TimeGrid uniform(double horizon, std::size_t cells) {
    if (!(horizon > 0.0)) throw std::invalid_argument("TimeGrid::uniform: horizon must be > 0");
    if (cells == 0) throw std::invalid_argument("TimeGrid::uniform: need at least one cell");
    std::vector<double> nodes(cells + 1);
    for (std::size_t i = 0; i <= cells; ++i) {
      nodes[i] = horizon * static_cast<double>(i) / static_cast<double>(cells);
    }
    nodes.back() = horizon;
    return TimeGrid(std::move(nodes));
  }

  const std::vector<double>& nodes() const { return nodes_; }
  double operator[](std::size_t i) const { return nodes_[i]; }
  std::size_t size() const { return nodes_.size(); }
  std::size_t cells() const { return nodes_.size() - 1; }
  double horizon() const { return nodes_.back(); }

  double mesh() const {
    double m = 0.0;
    for (std::size_t i = 1; i < nodes_.size(); ++i) m = std::max(m, nodes_[i] - nodes_[i - 1]);
    return m;
  }

  bool is_uniform(double rel_tol = 1e-12) const {
    if (cells() < 2) return true;
    const double h = nodes_[1] - nodes_[0];
    for (std::size_t i = 2; i < nodes_.size(); ++i) {
      if (std::abs((nodes_[i] - nodes_[i - 1]) - h) > rel_tol * horizon()) return false;
    }
    return true;
  }

  /// Index of the exact grid node at time t (tolerance scaled by the horizon).
  std::size_t index_of(double t, double rel_tol = 1e-9) const {
    const double tol = std::max(rel_tol * std::max(horizon(), 1.0), 1e-300);
    auto it = std::lower_bound(nodes_.begin(), nodes_.end(), t - tol);
    if (it == nodes_.end() || std::abs(*it - t) > tol) {
      throw std::invalid_argument("TimeGrid: t = " + std::to_string(t) + " is not a grid node");
    }
    return static_cast<std::size_t>(it - nodes_.begin());
  }

  /// Index of the last node <= t; t must be within [0, horizon].
  std::size_t floor_index(double t) const {
    if (t < 0.0 || t > horizon() * (1.0 + 1e-12)) {
      throw std::domain_error("TimeGrid: t = " + std::to_string(t) + " outside [0, horizon]");
    }
    auto it = std::upper_bound(nodes_.begin(), nodes_.end(), t);
    return static_cast<std::size_t>(it - nodes_.begin()) - 1;
  }

  bool same_nodes(const TimeGrid& other) const { return nodes_ == other.nodes_; }

  /// True when every node of `coarse` is a node of this grid.
  bool refines(const TimeGrid& coarse, double rel_tol = 1e-9) const {
    const double tol = rel_tol * std::max(horizon(), 1.0);
    std::size_t j = 0;
    for (double c : coarse.nodes()) {
      while (j < nodes_.size() && nodes_[j] < c - tol) ++j;
      if (j == nodes_.size() || std::abs(nodes_[j] - c) > tol) return false;
    }
    return true;
  }

 private:
  std::vector<double> nodes_;
};

/// A discretized R^d-valued path: one value vector per grid node, stored
/// node-major (values[node * dim + k]).
struct SamplePath {
  TimeGrid grid;
  std::size_t dim = 1;
  std::vector<double> values;

  SamplePath(TimeGrid g, std::size_t d)
      : grid(std::move(g)), dim(d), values(grid.size() * d, 0.0) {
    if (d == 0) throw std::invalid_argument("SamplePath: dimension must be >= 1");
  }

  SamplePath(TimeGrid g, std::size_t d, std::vector<double> vals)
      : grid(std::move(g)), dim(d), values(std::move(vals)) {
    if (d == 0) throw std::invalid_argument("SamplePath: dimension must be >= 1");
    if (values.size() != grid.size() * dim) {
      throw std::invalid_argument("SamplePath: need one value per node per component");
    }
    for (double v : values) {
      if (!std::isfinite(v)) throw std::invalid_argument("SamplePath: non-finite value");
    }
  }

  double at(std::size_t node, std::size_t comp = 0) const {
    return values[node * dim + comp];
  }
  double& at(std::size_t node, std::size_t comp = 0) {
    return values[node * dim + comp];
  }

  std::span<const double> node_values(std::size_t node) const {
    return {values.data() + node * dim, dim};
  }

  std::vector<double> component(std::size_t comp) const {
    std::vector<double> out(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) out[i] = at(i, comp);
    return out;
  }

  /// Restriction of this path to a coarser grid whose nodes all belong to
  /// this path's grid.
  SamplePath restrict_to(const TimeGrid& coarse) const {
    if (!grid.refines(coarse)) {
      throw std::invalid_argument("SamplePath::restrict_to: target grid is not a node subset");
    }
    SamplePath out(coarse, dim);
    for (std::size_t i = 0; i < coarse.size(); ++i) {
      const std::size_t j = grid.index_of(coarse[i]);
      for (std::size_t k = 0; k < dim; ++k) out.at(i, k) = at(j, k);
    }
    return out;
  }

  /// Euclidean distance between node values at two nodes.
  double node_distance(std::size_t i, std::size_t j) const {
    double s = 0.0;
    for (std::size_t k = 0; k < dim; ++k) {
      const double d = at(i, k) - at(j, k);
      s += d * d;
    }
    return std::sqrt(s);
  }
};

/// sup over common nodes of |x(t) - y(t)| (Euclidean in the state space).
inline double sup_node_distance(const SamplePath& x, const SamplePath& y) {
  if (!x.grid.same_nodes(y.grid) || x.dim != y.dim) {
    throw std::invalid_argument("sup_node_distance: paths must share grid and dimension");
  }
  double best = 0.0;
  for (std::size_t i = 0; i < x.grid.size(); ++i) {
    double s = 0.0;
    for (std::size_t k = 0; k < x.dim; ++k) {
      const double d = x.at(i, k) - y.at(i, k);
      s += d * d;
    }
    best = std::max(best, std::sqrt(s));
  }
  return best;
}

}  // namespace mixedsde

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "json.hpp"

#include "hosc/errors.hpp"

namespace hosc {

/// Truncated box [-L_a, L_a] per axis with m_a interior points, spacing
/// h_a = 2 L_a / (m_a + 1). Axis a (0-based) carries the coordinate t_{a+1}.
/// Points are flattened lexicographically with axis 0 fastest.
struct GridSpec {
  int n = 1;
  std::vector<double> half_extent;
  std::vector<int> points;

  static GridSpec uniform(int n, double L, int m) {
    const auto axes = static_cast<std::size_t>(2 * n + 1);
    GridSpec g{n, std::vector<double>(axes, L), std::vector<int>(axes, m)};
    g.validate();
    return g;
  }

  void validate() const {
    require(n >= 1, "grid: n must be >= 1");
    const auto axes = static_cast<std::size_t>(2 * n + 1);
    require(half_extent.size() == axes, "grid: need " + std::to_string(axes) + " half extents");
    require(points.size() == axes, "grid: need " + std::to_string(axes) + " point counts");
    for (std::size_t a = 0; a < axes; ++a) {
      require(half_extent[a] > 0.0, "grid: half extents must be positive");
      require(points[a] >= 3, "grid: every axis needs at least 3 interior points, axis " + std::to_string(a + 1) +
                                  " has " + std::to_string(points[a]));
    }
  }

  int axes() const { return 2 * n + 1; }
  int top_axis() const { return 2 * n; }

  double spacing(int axis) const {
    const auto a = static_cast<std::size_t>(axis);
    return 2.0 * half_extent[a] / (points[a] + 1);
  }

  /// i = 0..m-1 maps to -L + (i + 1) h.
  double coordinate(int axis, int i) const {
    return -half_extent[static_cast<std::size_t>(axis)] + (i + 1) * spacing(axis);
  }

  std::size_t size() const {
    std::size_t s = 1;
    for (int m : points) s *= static_cast<std::size_t>(m);
    return s;
  }

  std::size_t stride(int axis) const {
    std::size_t s = 1;
    for (int a = 0; a < axis; ++a) s *= static_cast<std::size_t>(points[static_cast<std::size_t>(a)]);
    return s;
  }

  std::vector<int> unflatten(std::size_t p) const {
    std::vector<int> idx(points.size());
    for (std::size_t a = 0; a < points.size(); ++a) {
      idx[a] = static_cast<int>(p % static_cast<std::size_t>(points[a]));
      p /= static_cast<std::size_t>(points[a]);
    }
    return idx;
  }

  std::size_t flatten(const std::vector<int>& idx) const {
    std::size_t p = 0;
    for (std::size_t a = points.size(); a-- > 0;) p = p * static_cast<std::size_t>(points[a]) + static_cast<std::size_t>(idx[a]);
    return p;
  }

  /// Number of grid layers between index i and the nearest face along axis.
  int layers_inside(int axis, int i) const {
    return std::min(i, points[static_cast<std::size_t>(axis)] - 1 - i);
  }

  friend bool operator==(const GridSpec&, const GridSpec&) = default;
};

inline void to_json(nlohmann::json& j, const GridSpec& g) {
  j = nlohmann::json{{"n", g.n}, {"extent", g.half_extent}, {"points", g.points}};
}

inline void from_json(const nlohmann::json& j, GridSpec& g) {
  g.n = j.value("n", 1);
  j.at("extent").get_to(g.half_extent);
  j.at("points").get_to(g.points);
}

}  // namespace hosc

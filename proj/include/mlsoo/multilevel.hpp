#pragma once

// Multi-level SOO: search over piecewise-linear curves with fixed end points
// whose resolution grows as cells shrink.
//
// A level-l cell encodes the curve at 2^l - 1 interior nodes on a uniform
// grid. Each node's value is stored as an offset from the linear
// interpolation of its two neighbours on the next coarser grid, so moving a
// coarse node drags every finer node in its support along by the
// interpolation weight without touching the finer offsets.
//
// Dimensions are kept in creation order: level 1 first, then the 2 level-2
// midpoints left to right, then the 4 level-3 midpoints, and so on. The
// dimension index therefore doubles as the creation order.

#include "mlsoo/errors.hpp"
#include "mlsoo/soo.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <vector>

namespace mlsoo {

struct LevelSchedule {
  double w = 8.0;   // initial offset width, i.e. the bound [-w/2, w/2]
  double p = 4.0;   // width shrink base per level
  std::size_t K = 3;
  std::optional<std::size_t> max_level;

  void validate() const {
    if (!(w > 0.0))
      throw ConfigError("schedule width w must be positive");
    if (!(p > 1.0))
      throw ConfigError("schedule base p must exceed 1");
    if (K < 3 || K % 2 == 0)
      throw ConfigError("split arity K must be odd and at least 3");
    if (max_level && *max_level < 1)
      throw ConfigError("max_level must be at least 1");
  }

  /// w * p^-l: the level-up threshold at level l and the width of the
  /// dimensions created by that level-up.
  double scaled(std::size_t l) const { return w * std::pow(p, -static_cast<double>(l)); }
};

struct EndpointSpec {
  double x_a = 0.0;
  double y_a = 0.0;
  double x_b = 1.0;
  double y_b = 0.0;

  void validate() const {
    if (!(x_a < x_b))
      throw ConfigError("endpoints need x_a < x_b");
  }
};

struct CurvePoint {
  double x = 0.0;
  double y = 0.0;
  friend bool operator==(const CurvePoint&, const CurvePoint&) = default;
};

/// Piecewise-linear curve, end points included.
struct DiscretizedCurve {
  std::vector<CurvePoint> points;

  std::size_t interior_size() const { return points.size() < 2 ? 0 : points.size() - 2; }

  /// Linear interpolation; x is clamped to the curve's span.
  double at(double x) const {
    if (x <= points.front().x)
      return points.front().y;
    if (x >= points.back().x)
      return points.back().y;
    auto it = std::upper_bound(points.begin(), points.end(), x,
                               [](double v, const CurvePoint& q) { return v < q.x; });
    const auto& hi = *it;
    const auto& lo = *(it - 1);
    const double t = (x - lo.x) / (hi.x - lo.x);
    return lo.y + t * (hi.y - lo.y);
  }
};

/// Builds a uniform-grid curve from interior y-values.
inline DiscretizedCurve curve_from_interior(const EndpointSpec& ep, std::span<const double> ys) {
  const std::size_t segments = ys.size() + 1;
  const double dx = (ep.x_b - ep.x_a) / static_cast<double>(segments);
  DiscretizedCurve c;
  c.points.reserve(segments + 1);
  c.points.push_back({ep.x_a, ep.y_a});
  for (std::size_t j = 0; j < ys.size(); ++j)
    c.points.push_back({ep.x_a + static_cast<double>(j + 1) * dx, ys[j]});
  c.points.push_back({ep.x_b, ep.y_b});
  return c;
}

/// Samples `f` at the interior nodes of a uniform grid with `segments` pieces.
inline DiscretizedCurve sample_curve(const EndpointSpec& ep, std::size_t segments,
                                     const std::function<double(double)>& f) {
  std::vector<double> ys(segments - 1);
  const double dx = (ep.x_b - ep.x_a) / static_cast<double>(segments);
  for (std::size_t j = 0; j + 1 < segments; ++j)
    ys[j] = f(ep.x_a + static_cast<double>(j + 1) * dx);
  return curve_from_interior(ep, ys);
}

struct DimensionMeta {
  std::size_t level = 1;
  std::size_t grid_index = 0;   // k-th node of its level, left to right
  std::size_t creation_order = 0;
};

struct Offset {
  double center = 0.0;
  double width = 0.0;
};

struct MultiCell {
  std::size_t level = 1;
  std::vector<Offset> offsets;
  std::vector<DimensionMeta> dims;

  std::size_t dimension() const noexcept { return offsets.size(); }

  /// Level-1 root: a single midpoint offset centered at 0 with width w.
  static MultiCell root(const LevelSchedule& s) {
    return MultiCell{1, {Offset{0.0, s.w}}, {DimensionMeta{1, 0, 0}}};
  }
};

/// Position of a level-m, grid-index-k node on the level-l fine grid.
inline std::size_t fine_index(std::size_t m, std::size_t k, std::size_t l) {
  return (2 * k + 1) << (l - m);
}

/// Absolute curve values for `cell`, coarse to fine.
inline DiscretizedCurve materialize(const MultiCell& cell, const EndpointSpec& ep) {
  const std::size_t l = cell.level;
  const std::size_t segments = std::size_t{1} << l;
  std::vector<double> y(segments + 1, 0.0);
  y.front() = ep.y_a;
  y.back() = ep.y_b;

  std::size_t dim = 0;
  for (std::size_t m = 1; m <= l; ++m) {
    const std::size_t step = std::size_t{1} << (l - m);
    const std::size_t count = std::size_t{1} << (m - 1);
    for (std::size_t k = 0; k < count; ++k, ++dim) {
      const std::size_t j = fine_index(m, k, l);
      y[j] = 0.5 * (y[j - step] + y[j + step]) + cell.offsets[dim].center;
    }
  }

  DiscretizedCurve c;
  c.points.resize(segments + 1);
  const double dx = (ep.x_b - ep.x_a) / static_cast<double>(segments);
  for (std::size_t j = 0; j <= segments; ++j)
    c.points[j] = {ep.x_a + static_cast<double>(j) * dx, y[j]};
  c.points.back() = {ep.x_b, ep.y_b};
  return c;
}

namespace detail {
// Widths reached by repeated division by K are compared with a relative
// slack so that w/3/3 and w*p^-l land on the same side of the threshold.
inline bool width_le(double a, double b) { return a <= b * (1.0 + 1e-12); }
inline bool width_gt(double a, double b) { return a > b * (1.0 + 1e-12); }
} // namespace detail

/// Every dimension width at most w * p^-l.
inline bool needs_level_up(const MultiCell& cell, const LevelSchedule& s) {
  const double threshold = s.scaled(cell.level);
  for (const auto& o : cell.offsets)
    if (!detail::width_le(o.width, threshold))
      return false;
  return true;
}

/// Appends the 2^l midpoints of the current grid as zero offsets of width
/// w * p^-l and bumps the level. The materialized curve is unchanged.
inline MultiCell add_level(const MultiCell& cell, const LevelSchedule& s) {
  if (!needs_level_up(cell, s))
    throw std::logic_error("add_level: cell still has a dimension wider than w * p^-l");
  MultiCell out = cell;
  const std::size_t l = cell.level;
  const std::size_t added = std::size_t{1} << l;
  const double width = s.scaled(l);
  out.offsets.reserve(cell.dimension() + added);
  out.dims.reserve(cell.dimension() + added);
  for (std::size_t k = 0; k < added; ++k) {
    out.offsets.push_back(Offset{0.0, width});
    out.dims.push_back(DimensionMeta{l + 1, k, out.dims.size()});
  }
  out.level = l + 1;
  return out;
}

/// Widest dimension; among equal widths the oldest, then the leftmost.
inline std::size_t choose_split_dim(const MultiCell& cell) {
  std::size_t best = 0;
  for (std::size_t d = 1; d < cell.dimension(); ++d) {
    const double wd = cell.offsets[d].width;
    const double wb = cell.offsets[best].width;
    if (detail::width_gt(wd, wb)) {
      best = d;
    } else if (detail::width_le(wd, wb) && detail::width_le(wb, wd)) {
      const auto& a = cell.dims[d];
      const auto& b = cell.dims[best];
      if (a.creation_order < b.creation_order ||
          (a.creation_order == b.creation_order && a.grid_index < b.grid_index))
        best = d;
    }
  }
  return best;
}

/// Splits the chosen dimension's offset interval into `arity` equal parts.
inline std::vector<MultiCell> split_cell(const MultiCell& cell, std::size_t arity = 3) {
  const std::size_t d = choose_split_dim(cell);
  std::vector<MultiCell> out;
  out.reserve(arity);
  for (auto [center, width] : split_interval(cell.offsets[d].center, cell.offsets[d].width, arity)) {
    MultiCell child = cell;
    child.offsets[d] = Offset{center, width};
    out.push_back(std::move(child));
  }
  return out;
}

/// Curve functional to be minimized. May return +inf for infeasible curves.
using CurveFunctional = std::function<double(const DiscretizedCurve&)>;

/// SOO partition over MultiCells: level up when due, then split.
class MultilevelPartition {
public:
  using cell_type = MultiCell;

  MultilevelPartition(CurveFunctional functional, EndpointSpec ep, LevelSchedule sched)
      : functional_(std::move(functional)), ep_(ep), sched_(sched) {
    ep_.validate();
    sched_.validate();
  }

  std::vector<MultiCell> split(const MultiCell& cell) const {
    const bool capped = sched_.max_level && cell.level >= *sched_.max_level;
    if (!capped && needs_level_up(cell, sched_))
      return split_cell(add_level(cell, sched_), sched_.K);
    return split_cell(cell, sched_.K);
  }

  /// Negated functional; +inf (infeasible) maps to -inf.
  double score(const MultiCell& cell) const {
    const double v = functional_(materialize(cell, ep_));
    if (std::isnan(v))
      throw ObjectiveError("functional returned NaN");
    return -v;
  }

  const EndpointSpec& endpoints() const noexcept { return ep_; }
  const LevelSchedule& schedule() const noexcept { return sched_; }

private:
  CurveFunctional functional_;
  EndpointSpec ep_;
  LevelSchedule sched_;
};

struct MultilevelResult {
  SooResult<MultiCell> soo;
  DiscretizedCurve best_curve;
  double best_value = 0.0;  // functional value of best_curve (minimization view)
};

/// Minimizes `functional` over curves pinned at `ep`.
inline MultilevelResult mlsoo_run(CurveFunctional functional, const EndpointSpec& ep,
                                  const LevelSchedule& sched, std::size_t budget,
                                  DepthCap cap = h_max_default, bool reuse_center = true) {
  Soo engine(MultilevelPartition(std::move(functional), ep, sched),
             SooOptions{budget, std::move(cap), reuse_center});
  auto soo = engine.run(MultiCell::root(sched));
  auto curve = materialize(soo.best().cell, ep);
  const double value = -soo.best().score;
  return MultilevelResult{std::move(soo), std::move(curve), value};
}

} // namespace mlsoo

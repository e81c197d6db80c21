#pragma once

// Empirical check that the best curve representable at level l approaches
// the continuous optimum f* at a geometric rate as l grows.
//
// For each level the level-l optimum is approximated by coordinate descent
// over the 2^l - 1 interior values, started from f* sampled on the grid, and
// its L1 distance to f* is measured by dense quadrature.

#include "mlsoo/errors.hpp"
#include "mlsoo/multilevel.hpp"
#include "mlsoo/quadrature.hpp"

#include <boost/math/tools/minima.hpp>

#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

namespace mlsoo {

struct Lemma1Row {
  std::size_t level = 0;
  double distance = 0.0;               // ||f* - f+^(l)||_1
  std::optional<double> ratio_to_next; // d_{l+1} / d_l
  std::size_t sweeps = 0;
};

struct CoordinateDescentOptions {
  double tolerance = 1e-10;   // max |change| of any coordinate in a sweep
  std::size_t max_sweeps = 20000;
};

/// Minimizes J over the interior values `ys` in place, one coordinate at a
/// time. Each coordinate takes parabolic steps from three probes and falls
/// back to Brent's method when the local model is not convex. Returns the
/// number of sweeps used.
inline std::size_t coordinate_descent(const CurveFunctional& J, const EndpointSpec& ep,
                                      std::vector<double>& ys,
                                      const CoordinateDescentOptions& opt = {}) {
  auto eval_at = [&](std::size_t i, double v) {
    const double keep = ys[i];
    ys[i] = v;
    const double out = J(curve_from_interior(ep, ys));
    ys[i] = keep;
    return out;
  };
  const double probe = 1e-3 * std::max(1.0, ep.x_b - ep.x_a);

  for (std::size_t sweep = 1; sweep <= opt.max_sweeps; ++sweep) {
    double biggest = 0.0;
    for (std::size_t i = 0; i < ys.size(); ++i) {
      const double start = ys[i];
      for (int step = 0; step < 50; ++step) {
        const double y0 = ys[i];
        const double jm = eval_at(i, y0 - probe);
        const double j0 = eval_at(i, y0);
        const double jp = eval_at(i, y0 + probe);
        const double curv = jp - 2.0 * j0 + jm;
        double next;
        if (curv > 0.0) {
          next = y0 - probe * (jp - jm) / (2.0 * curv);
        } else {
          auto f = [&](double v) { return eval_at(i, v); };
          const double r = 16.0 * probe;
          next = boost::math::tools::brent_find_minima(f, y0 - r, y0 + r, 40).first;
        }
        const double move = std::abs(next - y0);
        if (!(eval_at(i, next) <= j0))
          break;
        ys[i] = next;
        if (move <= 0.1 * opt.tolerance)
          break;
      }
      biggest = std::max(biggest, std::abs(ys[i] - start));
    }
    if (biggest <= opt.tolerance)
      return sweep;
  }
  throw ConvergenceError("coordinate descent did not converge");
}

/// J[f] = integral of (f - target)^2 over the curve's span.
inline CurveFunctional l2_misfit(std::function<double(double)> target, std::size_t panels = 16) {
  return [target = std::move(target), panels](const DiscretizedCurve& c) {
    double total = 0.0;
    for (std::size_t i = 1; i < c.points.size(); ++i) {
      const auto& a = c.points[i - 1];
      const auto& b = c.points[i];
      const double dx = b.x - a.x;
      total += dx * quadrature::gauss_unit(
                        [&](double t) {
                          const double e = a.y + t * (b.y - a.y) - target(a.x + t * dx);
                          return e * e;
                        },
                        panels);
    }
    return total;
  };
}

/// L1 distance between a polyline and a function over the polyline's span.
inline double l1_distance(const DiscretizedCurve& c, const std::function<double(double)>& f,
                          std::size_t panels = 400) {
  double total = 0.0;
  for (std::size_t i = 1; i < c.points.size(); ++i) {
    const auto& a = c.points[i - 1];
    const auto& b = c.points[i];
    const double dx = b.x - a.x;
    total += dx * quadrature::gauss_unit(
                      [&](double t) { return std::abs(a.y + t * (b.y - a.y) - f(a.x + t * dx)); },
                      panels);
  }
  return total;
}

/// Distances d_l for l = 1..max_level and successive ratios.
inline std::vector<Lemma1Row> lemma1_check(const CurveFunctional& J,
                                           const std::function<double(double)>& f_star,
                                           const EndpointSpec& ep, std::size_t max_level,
                                           const CoordinateDescentOptions& opt = {}) {
  ep.validate();
  if (max_level < 1)
    throw ConfigError("lemma1_check needs at least one level");
  std::vector<Lemma1Row> rows;
  for (std::size_t l = 1; l <= max_level; ++l) {
    const std::size_t segments = std::size_t{1} << l;
    auto ys = sample_curve(ep, segments, f_star).points;
    std::vector<double> interior;
    for (std::size_t j = 1; j + 1 < ys.size(); ++j)
      interior.push_back(ys[j].y);
    const std::size_t sweeps = coordinate_descent(J, ep, interior, opt);
    const double d = l1_distance(curve_from_interior(ep, interior), f_star);
    rows.push_back({l, d, std::nullopt, sweeps});
  }
  for (std::size_t i = 0; i + 1 < rows.size(); ++i)
    rows[i].ratio_to_next = rows[i + 1].distance / rows[i].distance;
  return rows;
}

} // namespace mlsoo

#pragma once

// Dense numerical integration of the benchmark functionals. This is a
// verification path only: it integrates ds / v(y) and 2 pi |y| ds directly
// instead of using the per-segment closed forms in functionals.hpp.

#include "mlsoo/functionals.hpp"

#include <array>
#include <cmath>
#include <numbers>

namespace mlsoo::quadrature {

/// Panels of 3-point Gauss-Legendre per integration interval; 3 nodes each,
/// so well over 10^4 integrand samples per curve segment.
inline constexpr std::size_t kPanels = 4000;

/// Composite 3-point Gauss-Legendre on [0, 1]. Never samples the interval
/// ends, so integrable end singularities are harmless.
template <class F>
double gauss_unit(F&& f, std::size_t panels = kPanels) {
  static constexpr std::array<double, 3> node{-0.7745966692414834, 0.0, 0.7745966692414834};
  static constexpr std::array<double, 3> weight{5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0};
  const double h = 1.0 / static_cast<double>(panels);
  double sum = 0.0;
  for (std::size_t p = 0; p < panels; ++p) {
    const double mid = (static_cast<double>(p) + 0.5) * h;
    double part = 0.0;
    for (std::size_t k = 0; k < 3; ++k)
      part += weight[k] * f(mid + 0.5 * h * node[k]);
    sum += part;
  }
  return 0.5 * h * sum;
}

/// Travel time by integrating ds / v(y(s)) along each segment. Each segment
/// is halved and each half mapped with s = H tau^2 from its outer end, which
/// removes the 1/sqrt(s) behaviour where the bead is momentarily at rest.
inline double brachistochrone_time(const DiscretizedCurve& curve, const BrachistochroneParams& params) {
  const auto& pts = curve.points;
  for (const auto& q : pts)
    if (params.speed_sq(q.y) < 0.0)
      return kInf;

  double total = 0.0;
  for (std::size_t i = 1; i < pts.size(); ++i) {
    const auto& a = pts[i - 1];
    const auto& b = pts[i];
    const double len = std::hypot(b.x - a.x, b.y - a.y);
    if (std::sqrt(params.speed_sq(a.y)) + std::sqrt(params.speed_sq(b.y)) == 0.0)
      return kInf;
    const double half = 0.5 * len;
    const double mid_y = 0.5 * (a.y + b.y);
    auto half_time = [&](double y_end) {
      // y as a function of distance s from the outer end, s in [0, half].
      return gauss_unit([&](double tau) {
        const double s = half * tau * tau;
        const double y = y_end + (mid_y - y_end) * (s / half);
        return 2.0 * half * tau / std::sqrt(params.speed_sq(y));
      });
    };
    total += half_time(a.y) + half_time(b.y);
  }
  return total;
}

/// Swept area by integrating 2 pi |y(s)| ds along each segment.
inline double catenary_area(const DiscretizedCurve& curve) {
  const auto& pts = curve.points;
  double total = 0.0;
  for (std::size_t i = 1; i < pts.size(); ++i) {
    const auto& a = pts[i - 1];
    const auto& b = pts[i];
    const double len = std::hypot(b.x - a.x, b.y - a.y);
    total += len * gauss_unit([&](double t) {
      return 2.0 * std::numbers::pi * std::abs(a.y + t * (b.y - a.y));
    });
  }
  return total;
}

/// Oracle for a built-in instance.
inline double evaluate(const DiscretizedCurve& curve, const FunctionalInstance& fi) {
  if (fi.brachistochrone)
    return quadrature::brachistochrone_time(curve, *fi.brachistochrone);
  if (fi.catenary)
    return quadrature::catenary_area(curve);
  throw ConfigError("no quadrature oracle for custom instances");
}

} // namespace mlsoo::quadrature

#pragma once

// Benchmark functionals over piecewise-linear curves.
//
// Coordinates: y points down. A bead released at (x_a, y_a) with speed v0
// has v^2 = v0^2 + 2 g (y - y_a) at height y, so larger y is faster.
//
// Both functionals are minimized; +inf marks a curve the bead cannot
// traverse.

#include "mlsoo/errors.hpp"
#include "mlsoo/multilevel.hpp"

#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace mlsoo {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

struct BrachistochroneParams {
  double v0 = 0.0;
  double g = 1.0;
  EndpointSpec endpoints;

  void validate() const {
    if (!(v0 >= 0.0))
      throw ConfigError("v0 must be nonnegative");
    if (!(g > 0.0))
      throw ConfigError("gravity must be positive");
    endpoints.validate();
  }

  /// Squared speed at depth y.
  double speed_sq(double y) const { return v0 * v0 + 2.0 * g * (y - endpoints.y_a); }
};

struct CatenaryParams {
  EndpointSpec endpoints{-0.5, 1.0, 0.5, 1.0};
};

namespace detail {
inline void require_endpoints(const DiscretizedCurve& c, const EndpointSpec& ep) {
  if (c.points.size() < 2)
    throw std::invalid_argument("curve needs at least two points");
  const auto& a = c.points.front();
  const auto& b = c.points.back();
  if (a.x != ep.x_a || a.y != ep.y_a || b.x != ep.x_b || b.y != ep.y_b)
    throw std::invalid_argument("curve endpoints do not match the functional's endpoints");
}
} // namespace detail

/// Travel time along the polyline. On a straight segment v^2 is linear in
/// arc length, so each segment takes exactly 2 L / (v_i + v_{i+1}).
inline double brachistochrone_time(const DiscretizedCurve& curve, const BrachistochroneParams& params) {
  detail::require_endpoints(curve, params.endpoints);
  const auto& pts = curve.points;

  double v_prev = 0.0;
  double total = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const double vsq = params.speed_sq(pts[i].y);
    if (vsq < 0.0)
      return kInf;
    const double v = std::sqrt(vsq);
    if (i > 0) {
      const double sum = v_prev + v;
      if (sum == 0.0)
        return kInf;
      const double len = std::hypot(pts[i].x - pts[i - 1].x, pts[i].y - pts[i - 1].y);
      total += 2.0 * len / sum;
    }
    v_prev = v;
  }
  return total;
}

/// Area of the surface swept by rotating the polyline about the x-axis.
/// Segments that cross y = 0 are split at the crossing (two cones).
inline double catenary_area(const DiscretizedCurve& curve) {
  const auto& pts = curve.points;
  double total = 0.0;
  for (std::size_t i = 1; i < pts.size(); ++i) {
    const double y0 = pts[i - 1].y;
    const double y1 = pts[i].y;
    const double len = std::hypot(pts[i].x - pts[i - 1].x, y1 - y0);
    const double r0 = std::abs(y0);
    const double r1 = std::abs(y1);
    if ((y0 < 0.0 && y1 > 0.0) || (y0 > 0.0 && y1 < 0.0)) {
      const double t = r0 / (r0 + r1);
      total += std::numbers::pi * (r0 * t * len + r1 * (1.0 - t) * len);
    } else {
      total += std::numbers::pi * (r0 + r1) * len;
    }
  }
  return total;
}

// ---------------------------------------------------------------------------
// Analytic optima.

/// Cycloid x = x_c + a (t - sin t), y = y_c + a (1 - cos t) for t in [t0, t1],
/// generated from a virtual cusp at rest at height y_c.
struct CycloidSolution {
  double a = 0.0;
  double t0 = 0.0;
  double t1 = 0.0;
  double x_c = 0.0;
  double y_c = 0.0;
  double g = 1.0;
  double min_time = 0.0;

  double x_of(double t) const { return x_c + a * (t - std::sin(t)); }
  double y_of(double t) const { return y_c + a * (1.0 - std::cos(t)); }

  /// Height at abscissa x, by bisection on the monotone x(t).
  double y_at(double x) const {
    double lo = t0;
    double hi = t1;
    for (int it = 0; it < 200 && hi - lo > 1e-16; ++it) {
      const double mid = 0.5 * (lo + hi);
      (x_of(mid) < x ? lo : hi) = mid;
    }
    return y_of(0.5 * (lo + hi));
  }
};

/// Fastest-descent cycloid through the endpoints with initial speed v0.
/// Solves for the generating radius by bisection on the horizontal span.
inline CycloidSolution cycloid_optimum(const BrachistochroneParams& params) {
  params.validate();
  const auto& ep = params.endpoints;
  const double g = params.g;
  const double y_c = ep.y_a - params.v0 * params.v0 / (2.0 * g);
  const double d0 = ep.y_a - y_c;
  const double d1 = ep.y_b - y_c;
  const double target = ep.x_b - ep.x_a;
  if (d1 < 0.0)
    throw DomainError("end point is above the energy limit; no cycloid reaches it");

  const double pi = std::numbers::pi;
  auto phase = [](double d, double a) { return std::acos(std::clamp(1.0 - d / a, -1.0, 1.0)); };
  auto X = [](double t) { return t - std::sin(t); };

  // Branch A: end on the descending half (t1 <= pi). Branch B: end on the
  // rising half (t1 = 2 pi - phase). They meet at a_min where t1 = pi.
  struct Arc {
    double t0, t1;
  };
  auto arc = [&](double a, bool rising) {
    const double c0 = phase(d0, a);
    const double c1 = phase(d1, a);
    return Arc{c0, rising ? 2.0 * pi - c1 : c1};
  };
  auto span = [&](double a, bool rising) {
    const Arc r = arc(a, rising);
    return a * (X(r.t1) - X(r.t0));
  };

  const double a_min = std::max({d0, d1, 1e-300}) / 2.0;
  const double s_min = span(a_min, true);
  bool rising = true;
  if (target < s_min) {
    if (d1 <= d0)
      throw DomainError("no forward cycloid connects the endpoints with this v0");
    rising = false;
  }

  double lo = a_min;
  double hi = std::max(a_min, target);
  if (rising) {
    while (span(hi, true) < target) {
      hi *= 2.0;
      if (!std::isfinite(hi))
        throw DomainError("cycloid radius search diverged");
    }
  } else {
    while (span(hi, false) > target) {
      hi *= 2.0;
      if (!std::isfinite(hi))
        throw DomainError("cycloid radius search diverged");
    }
  }
  for (int it = 0; it < 400 && hi - lo > 1e-17 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    const bool short_of_target = span(mid, rising) < target;
    // Branch B grows with a, branch A shrinks.
    if (short_of_target == rising)
      lo = mid;
    else
      hi = mid;
  }
  const double a = 0.5 * (lo + hi);
  const Arc r = arc(a, rising);
  if (std::abs(span(a, rising) - target) > 1e-9 * target)
    throw DomainError("cycloid span equation did not converge");

  CycloidSolution s;
  s.a = a;
  s.t0 = r.t0;
  s.t1 = r.t1;
  s.y_c = y_c;
  s.x_c = ep.x_a - a * X(r.t0);
  s.g = g;
  s.min_time = (r.t1 - r.t0) * std::sqrt(a / g);
  return s;
}

/// Surface area of y = a cosh((x - x_mid)/a) over a symmetric half-span h.
inline double catenoid_area(double a, double half_span) {
  return 2.0 * std::numbers::pi * a * (half_span + 0.5 * a * std::sinh(2.0 * half_span / a));
}

struct CatenoidSolution {
  double a = 0.0;
  double x_mid = 0.0;
  double min_area = 0.0;

  double y_at(double x) const { return a * std::cosh((x - x_mid) / a); }
};

/// Raised when the rings are too far apart for any catenoid.
class NoCatenoidError : public DomainError {
public:
  NoCatenoidError(const std::string& what, double goldschmidt)
      : DomainError(what), goldschmidt_area(goldschmidt) {}
  double goldschmidt_area;
};

/// Both roots of a cosh(h/a) = y_e: {small (unstable), large (stable)}.
inline std::pair<double, double> catenoid_roots(double half_span, double y_end) {
  const double h = half_span;
  // a cosh(h/a) is minimal where u tanh u = 1, u = h/a.
  double ulo = 0.5, uhi = 3.0;
  for (int it = 0; it < 200; ++it) {
    const double u = 0.5 * (ulo + uhi);
    (u * std::tanh(u) < 1.0 ? ulo : uhi) = u;
  }
  const double u_star = 0.5 * (ulo + uhi);
  const double a_star = h / u_star;
  auto gfun = [h](double a) { return a * std::cosh(h / a); };
  if (gfun(a_star) > y_end) {
    throw NoCatenoidError("no catenoid spans rings of radius " + std::to_string(y_end) +
                              " at half-distance " + std::to_string(h),
                          2.0 * std::numbers::pi * y_end * y_end);
  }

  auto bisect = [&](double lo, double hi, bool increasing) {
    for (int it = 0; it < 400 && hi - lo > 1e-17 * hi; ++it) {
      const double mid = 0.5 * (lo + hi);
      const bool below = gfun(mid) < y_end;
      (below == increasing ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
  };
  // g decreases on (0, a*] and increases on [a*, inf); g(y_end) >= y_end.
  const double large = bisect(a_star, std::max(a_star, y_end), true);
  double small_lo = a_star;
  while (gfun(small_lo) <= y_end && small_lo > 1e-300)
    small_lo *= 0.5;
  const double small = bisect(small_lo, a_star, false);
  return {small, large};
}

/// The stable (larger-a, smaller-area) catenoid between equal-height rings.
inline CatenoidSolution catenoid_optimum(const CatenaryParams& params) {
  const auto& ep = params.endpoints;
  ep.validate();
  if (ep.y_a != ep.y_b || !(ep.y_a > 0.0))
    throw DomainError("catenoid solver needs equal positive end heights");
  const double h = 0.5 * (ep.x_b - ep.x_a);
  const auto [small, large] = catenoid_roots(h, ep.y_a);
  (void)small;
  return CatenoidSolution{large, 0.5 * (ep.x_a + ep.x_b), catenoid_area(large, h)};
}

// ---------------------------------------------------------------------------
// Benchmark instances.

enum class ProblemKind { brachistochrone1, brachistochrone2, catenary, custom };

inline std::string_view to_string(ProblemKind k) {
  switch (k) {
  case ProblemKind::brachistochrone1: return "brachistochrone1";
  case ProblemKind::brachistochrone2: return "brachistochrone2";
  case ProblemKind::catenary: return "catenary";
  case ProblemKind::custom: return "custom";
  }
  return "custom";
}

inline ProblemKind parse_problem(std::string_view s) {
  if (s == "brachistochrone1")
    return ProblemKind::brachistochrone1;
  if (s == "brachistochrone2")
    return ProblemKind::brachistochrone2;
  if (s == "catenary")
    return ProblemKind::catenary;
  throw ConfigError("unknown problem '" + std::string(s) + "'");
}

struct FunctionalInstance {
  ProblemKind kind = ProblemKind::custom;
  EndpointSpec endpoints;
  CurveFunctional evaluate;
  std::optional<double> known_optimum;
  std::function<double(double)> optimum_y;  // empty when no analytic optimum

  std::optional<BrachistochroneParams> brachistochrone;
  std::optional<CatenaryParams> catenary;

  /// Analytic optimum sampled on a uniform grid of `segments` pieces.
  DiscretizedCurve optimum_curve(std::size_t segments) const {
    if (!optimum_y)
      throw ConfigError("instance has no analytic optimum");
    return sample_curve(endpoints, segments, optimum_y);
  }
};

inline FunctionalInstance make_brachistochrone(ProblemKind kind, const BrachistochroneParams& p,
                                               std::optional<double> known) {
  const auto sol = cycloid_optimum(p);
  FunctionalInstance fi;
  fi.kind = kind;
  fi.endpoints = p.endpoints;
  fi.evaluate = [p](const DiscretizedCurve& c) { return brachistochrone_time(c, p); };
  fi.known_optimum = known ? known : std::optional<double>(sol.min_time);
  fi.optimum_y = [sol](double x) { return sol.y_at(x); };
  fi.brachistochrone = p;
  return fi;
}

/// Ends (0,0) and (1,0), v0 = sqrt(2/(2+pi)); minimum pi/sqrt(2+pi).
inline FunctionalInstance brachistochrone_case1() {
  const double pi = std::numbers::pi;
  BrachistochroneParams p{std::sqrt(2.0 / (2.0 + pi)), 1.0, EndpointSpec{0.0, 0.0, 1.0, 0.0}};
  return make_brachistochrone(ProblemKind::brachistochrone1, p, pi / std::sqrt(2.0 + pi));
}

/// Ends (0,0) and (1, 2/(2+pi)), v0 = 2/sqrt(2+pi); minimum pi/sqrt(4+2pi).
inline FunctionalInstance brachistochrone_case2() {
  const double pi = std::numbers::pi;
  BrachistochroneParams p{2.0 / std::sqrt(2.0 + pi), 1.0, EndpointSpec{0.0, 0.0, 1.0, 2.0 / (2.0 + pi)}};
  return make_brachistochrone(ProblemKind::brachistochrone2, p, pi / std::sqrt(4.0 + 2.0 * pi));
}

/// Rings of radius `end_height` at x = -0.5 and x = 0.5.
inline FunctionalInstance catenary_instance(double end_height = 1.0) {
  CatenaryParams p{EndpointSpec{-0.5, end_height, 0.5, end_height}};
  const auto sol = catenoid_optimum(p);
  FunctionalInstance fi;
  fi.kind = ProblemKind::catenary;
  fi.endpoints = p.endpoints;
  fi.evaluate = [](const DiscretizedCurve& c) { return catenary_area(c); };
  fi.known_optimum = sol.min_area;
  fi.optimum_y = [sol](double x) { return sol.y_at(x); };
  fi.catenary = p;
  return fi;
}

inline FunctionalInstance make_instance(ProblemKind kind, double catenary_height = 1.0) {
  switch (kind) {
  case ProblemKind::brachistochrone1: return brachistochrone_case1();
  case ProblemKind::brachistochrone2: return brachistochrone_case2();
  case ProblemKind::catenary: return catenary_instance(catenary_height);
  case ProblemKind::custom: break;
  }
  throw ConfigError("custom instances must be built directly");
}

} // namespace mlsoo

#pragma once

// Randomized consistency checks between the closed-form functionals and the
// quadrature oracle.

#include "mlsoo/functionals.hpp"
#include "mlsoo/multilevel.hpp"
#include "mlsoo/quadrature.hpp"

#include <cmath>
#include <cstdint>
#include <random>

namespace mlsoo {

/// A level-`level` cell whose offsets are drawn uniformly inside the widths
/// the schedule assigns to each level at creation.
template <class Rng>
MultiCell random_cell(std::size_t level, const LevelSchedule& s, Rng& rng) {
  MultiCell c = MultiCell::root(s);
  while (c.level < level) {
    for (auto& o : c.offsets)
      o.width = std::min(o.width, s.scaled(c.level));
    c = add_level(c, s);
  }
  for (std::size_t d = 0; d < c.dimension(); ++d) {
    const double width = s.scaled(c.dims[d].level - 1);
    std::uniform_real_distribution<double> u(-0.5 * width, 0.5 * width);
    c.offsets[d] = Offset{u(rng), width};
  }
  return c;
}

struct AgreementReport {
  std::size_t curves = 0;
  std::size_t rejected = 0;    // infeasible draws skipped
  double max_rel_error = 0.0;
};

/// Draws `count` feasible random curves at levels 1..4 and compares the
/// closed-form functional to the quadrature oracle.
inline AgreementReport oracle_agreement(const FunctionalInstance& fi, std::size_t count,
                                        std::uint64_t seed, const LevelSchedule& s = {}) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> level(1, 4);
  AgreementReport rep;
  while (rep.curves < count) {
    const auto curve = materialize(random_cell(level(rng), s, rng), fi.endpoints);
    const double closed = fi.evaluate(curve);
    if (!std::isfinite(closed)) {
      ++rep.rejected;
      continue;
    }
    const double oracle = quadrature::evaluate(curve, fi);
    rep.max_rel_error = std::max(rep.max_rel_error, std::abs(closed - oracle) / std::abs(oracle));
    ++rep.curves;
  }
  return rep;
}

} // namespace mlsoo

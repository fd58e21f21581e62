#pragma once

#include <cmath>
#include <numbers>

#include "liouville/assembly.hpp"

namespace liouville::testing {

// Analytic unit-Wronskian families. Polynomial and trigonometric tables are
// wide enough for |t|, |x| <= 5; hyperbolic ones stop at 7 because
// cosh^2 - sinh^2 loses digits to cancellation further out.
inline constexpr Interval kFamilyTable{-12.0, 12.0};
inline constexpr Interval kHyperbolicTable{-7.0, 7.0};
inline constexpr double kFamilyStep = 1e-3;

inline WronskianPair family_pair(const char* f1, const char* f2, Interval range = kFamilyTable) {
  return WronskianPair::tabulate(parse(f1), parse(f2), range, kFamilyStep);
}

// chi = psi = (1, s): F = 2x.
inline LiouvilleSolution linear_family(double m = 1.0) {
  return build_solution(family_pair("1", "x"), family_pair("1", "x"), m);
}

// chi = (cosh, sinh), psi = (-sinh, cosh): F = cosh(2t).
inline LiouvilleSolution hyperbolic_family(double m = 1.0) {
  return build_solution(family_pair("cosh(x)", "sinh(x)", kHyperbolicTable),
                        family_pair("-sinh(x)", "cosh(x)", kHyperbolicTable), m);
}

// chi = (cos, sin), psi = (sin, -cos): F = -cos(2x).
inline LiouvilleSolution trigonometric_family(double m = 1.0) {
  return build_solution(family_pair("cos(x)", "sin(x)"), family_pair("sin(x)", "-cos(x)"), m);
}

// chi = (cosh, sinh), psi = (sin, -cos): zero curves that move in t.
inline LiouvilleSolution mixed_family(double m = 1.0) {
  return build_solution(family_pair("cosh(x)", "sinh(x)", kHyperbolicTable),
                        family_pair("sin(x)", "-cos(x)", kHyperbolicTable), m);
}

inline double constant_data_phi(double c, double m, double t) {
  const double k = m / 4.0 * std::exp(c / 2.0);
  return c - 2.0 * std::log(std::cosh(2.0 * k * t));
}

}  // namespace liouville::testing

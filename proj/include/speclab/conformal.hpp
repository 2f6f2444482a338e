#pragma once

#include "speclab/types.hpp"

namespace speclab {

struct IntervalSpec {
  double a;
  double b;
  IntervalSpec(double a_, double b_) : a(a_), b(b_) {
    if (!(a < b)) throw ParameterError("interval requires a < b");
  }
  double length() const { return b - a; }
};

/// Conformal map of the punctured unit disk onto the complement of
/// [a,b]: w -> (b-a)/4 (w + 1/w + 2) + a, with 0 -> infinity.
Complex interval_map(Complex w, const IntervalSpec& iv);
Complex interval_map_deriv(Complex w, const IntervalSpec& iv);

/// Inverse branch with |w| < 1; rejects lambda on the cut.
Complex interval_map_inv(Complex lambda, const IntervalSpec& iv);

/// Conformal map of the unit disk onto the complement of [0,inf):
/// w -> a ((1+w)/(1-w))^2 with a < 0; 0 -> a, -1 -> 0, 1 -> infinity.
Complex halfline_map(Complex w, double a);
Complex halfline_map_deriv(Complex w, double a);

/// Inverse (sqrt(-lambda) - b)/(sqrt(-lambda) + b), b = sqrt(-a),
/// principal square root (Re > 0 off the halfline).
Complex halfline_map_inv(Complex lambda, double a);

double dist_interval(Complex lambda, const IntervalSpec& iv);
double dist_halfline(Complex lambda);

/// Two-sided distortion bound for the interval map with the exact
/// constants (b-a)/8 and (b-a)(1+sqrt 2)/8 against
/// |w^2-1|(1-|w|)/|w|.
BoundReport interval_distortion_check(Complex w, const IntervalSpec& iv,
                                      double rel_tol = 1e-12);

enum class MapKind { interval, halfline };

/// Koebe distortion bound with the exact constants 1/4 and 2, using
/// the closed-form derivative and the exact boundary distance.  For
/// the interval map the lower bound holds on 1/2 <= |w| < 1 only (the
/// map has a pole at 0); callers must stay in that region.
BoundReport koebe_check(MapKind kind, Complex w, double param_a, double param_b = 0.0,
                        double rel_tol = 1e-12);

struct IdentityCheck {
  std::string name;
  double lhs = 0.0;
  double rhs = 0.0;
  double rel_error = 0.0;
  bool pass = false;
};

/// The exact algebraic identities and the sharp-constant inequality
/// behind the interval and halfline maps, evaluated at one w:
///   |a - phi(w)|  = (b-a)/4 |w+1|^2 / |w|
///   |b - phi(w)|  = (b-a)/4 |w-1|^2 / |w|
///   |winv^2 - 1|  = 4/(b-a) |winv| (|l-a||l-b|)^(1/2)
///   1 - |winv|   >= 2/(1+sqrt2) dist(l,[a,b]) / (|l-a||l-b|)^(1/2)
///   psi(w) - a    = 4 a w / (1-w)^2
///   |sqrt(-l)-b'| = |l - a'| / |sqrt(-l)+b'|
std::vector<IdentityCheck> conformal_identities_check(Complex w,
                                                      const IntervalSpec& iv,
                                                      double halfline_a,
                                                      double tol = 1e-10);

} // namespace speclab

#pragma once

#include <functional>
#include <vector>

namespace speclab {

struct QuadratureResult {
  double value = 0.0;
  double error_estimate = 0.0;
  bool converged = false;
  long evaluations = 0;
};

struct QuadratureOptions {
  double abs_tol = 1e-10;
  double rel_tol = 1e-12;
  int max_depth = 52;
  long max_panels = 20000;
  /// Accuracy of the integrand values themselves (nonzero when f is
  /// produced by an inner quadrature); panels are never refined below
  /// the error this noise implies.
  double eval_noise = 0.0;
  /// Interior points where the integrand changes character; the
  /// interval is pre-split there before adaptation starts.
  std::vector<double> split_points = {};
};

/// Adaptive Gauss-Kronrod (G7,K15) integration of f over [a, b].
QuadratureResult integrate(const std::function<double(double)>& f, double a,
                           double b, const QuadratureOptions& opts = {});

/// Integral over [0, 2pi) of a periodic integrand, with optional
/// singularity splitting at the given angles.
QuadratureResult integrate_circle(const std::function<double(double)>& f,
                                  const std::vector<double>& split_angles = {},
                                  const QuadratureOptions& opts = {});

} // namespace speclab

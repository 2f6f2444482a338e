#pragma once

#include "speclab/analytic_handle.hpp"

namespace speclab {

struct Box {
  double re_lo = 0, re_hi = 0, im_lo = 0, im_hi = 0;

  double width() const { return re_hi - re_lo; }
  double height() const { return im_hi - im_lo; }
  double diameter() const;
  Complex center() const { return {0.5 * (re_lo + re_hi), 0.5 * (im_lo + im_hi)}; }
  bool contains(Complex z) const {
    return z.real() >= re_lo && z.real() <= re_hi && z.imag() >= im_lo &&
           z.imag() <= im_hi;
  }
};

struct WindingOptions {
  int initial_samples = 32;
  int max_samples = 1 << 20;
  double min_modulus = 1e-12; // contour-through-zero threshold
  /// Curve parameters (in [0,1]) where the integrand has sharp phase
  /// structure; the initial grid is refined geometrically around them
  /// down to focus_scale.  Uniform sampling aliases whole turns near
  /// such points (e.g. branch-point corners just off the contour).
  std::vector<double> focus_ts = {};
  double focus_scale = 1e-9;
};

/// Winding number of h along the counterclockwise circle
/// |z - center| = radius, by adaptive argument tracking.  Throws
/// ContourError if |h| dips below min_modulus on the contour or the
/// count does not stabilize to an integer (residue > 0.1).
int winding_on_circle(const AnalyticHandle& h, Complex center, double radius,
                      const WindingOptions& opts = {});

/// Winding number along the counterclockwise boundary of the box.
int winding_on_box(const AnalyticHandle& h, const Box& box,
                   const WindingOptions& opts = {});

} // namespace speclab

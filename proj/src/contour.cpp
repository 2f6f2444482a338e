#include "speclab/contour.hpp"

#include <algorithm>
#include <cmath>

namespace speclab {

void ClassParams::validate() const {
  if (alpha < 0 || gamma < 0 || bigK < 0)
    throw ParameterError("class parameters must be nonnegative");
  if (beta.size() != xi.size())
    throw ParameterError("beta and xi must have matching lengths");
  for (size_t i = 0; i < xi.size(); ++i) {
    if (std::abs(std::abs(xi[i]) - 1.0) > 1e-12)
      throw ParameterError("xi entries must be unimodular");
    for (size_t j = i + 1; j < xi.size(); ++j)
      if (std::abs(xi[i] - xi[j]) < 1e-12)
        throw ParameterError("xi entries must be pairwise distinct");
  }
}

Complex AnalyticHandle::deriv_or_fd(Complex z, double scale) const {
  if (derivative) return derivative(z);
  double delta = 1e-6 * std::max(scale, 1e-12);
  return (evaluate(z + delta) - evaluate(z - delta)) / (2.0 * delta);
}

double Box::diameter() const { return std::hypot(width(), height()); }

namespace {

// Accumulate argument increments of h along gamma([t0,t1]); each step
// must turn by less than pi/2, otherwise the segment is split.
double arg_increment(const AnalyticHandle& h,
                     const std::function<Complex(double)>& gamma, double t0,
                     Complex v0, double t1, Complex v1, double min_mod,
                     int depth, long& evals, long max_evals) {
  Complex ratio = v1 / v0;
  double d = std::arg(ratio);
  if (std::abs(d) < 1.5707963267948966 && std::abs(ratio) > 0.1 &&
      std::abs(ratio) < 10.0)
    return d;
  if (depth > 48 || evals > max_evals)
    throw ContourError("winding count did not stabilize (possible zero on contour)");
  double tm = 0.5 * (t0 + t1);
  Complex vm = h(gamma(tm));
  evals++;
  if (std::abs(vm) < min_mod)
    throw ContourError("contour passes through a zero");
  return arg_increment(h, gamma, t0, v0, tm, vm, min_mod, depth + 1, evals, max_evals) +
         arg_increment(h, gamma, tm, vm, t1, v1, min_mod, depth + 1, evals, max_evals);
}

int winding_on_curve(const AnalyticHandle& h,
                     const std::function<Complex(double)>& gamma,
                     const WindingOptions& opts) {
  const int n = opts.initial_samples;
  std::vector<double> ts;
  ts.reserve(size_t(n) + 1 + 96 * opts.focus_ts.size());
  for (int k = 0; k <= n; ++k) ts.push_back(double(k) / n);
  for (double f : opts.focus_ts) {
    double span = 1.0 / n;
    for (double d = span; d > opts.focus_scale; d *= 0.5) {
      if (f - d > 0.0) ts.push_back(f - d);
      if (f + d < 1.0) ts.push_back(f + d);
    }
    if (f > 0.0 && f < 1.0) ts.push_back(f);
  }
  std::sort(ts.begin(), ts.end());
  ts.erase(std::unique(ts.begin(), ts.end()), ts.end());

  long evals = 0;
  std::vector<Complex> vals(ts.size());
  for (size_t k = 0; k < ts.size(); ++k) {
    vals[k] = h(gamma(ts[k]));
    evals++;
    if (std::abs(vals[k]) < opts.min_modulus)
      throw ContourError("contour passes through a zero");
  }
  double total = 0.0;
  for (size_t k = 0; k + 1 < ts.size(); ++k)
    total += arg_increment(h, gamma, ts[k], vals[k], ts[k + 1], vals[k + 1],
                           opts.min_modulus, 0, evals, opts.max_samples);
  double w = total / 6.283185307179586477;
  double rounded = std::round(w);
  if (std::abs(w - rounded) > 0.1)
    throw ContourError("winding count is not close to an integer");
  return int(rounded);
}

} // namespace

int winding_on_circle(const AnalyticHandle& h, Complex center, double radius,
                      const WindingOptions& opts) {
  if (!(radius > 0)) throw ParameterError("radius must be positive");
  auto gamma = [center, radius](double t) {
    return center + radius * std::polar(1.0, 6.283185307179586477 * t);
  };
  return winding_on_curve(h, gamma, opts);
}

int winding_on_box(const AnalyticHandle& h, const Box& box,
                   const WindingOptions& opts) {
  if (!(box.width() > 0) || !(box.height() > 0))
    throw ParameterError("box must have positive area");
  Complex c00(box.re_lo, box.im_lo), c10(box.re_hi, box.im_lo),
      c11(box.re_hi, box.im_hi), c01(box.re_lo, box.im_hi);
  auto gamma = [&](double t) -> Complex {
    double s = t * 4.0;
    if (s < 1.0) return c00 + s * (c10 - c00);
    if (s < 2.0) return c10 + (s - 1.0) * (c11 - c10);
    if (s < 3.0) return c11 + (s - 2.0) * (c01 - c11);
    return c01 + (s - 3.0) * (c00 - c01);
  };
  WindingOptions o = opts;
  o.initial_samples = std::max(opts.initial_samples, 16) / 4 * 4;
  return winding_on_curve(h, gamma, o);
}

} // namespace speclab

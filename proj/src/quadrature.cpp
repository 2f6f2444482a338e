#include "speclab/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <queue>

namespace speclab {
namespace {

// QUADPACK (G7,K15) nodes and weights on [-1,1].
constexpr double kXgk[8] = {
    0.9914553711208126, 0.9491079123427585, 0.8648644233597691,
    0.7415311855993944, 0.5860872354676911, 0.4058451513773972,
    0.2077849550078985, 0.0};
constexpr double kWgk[8] = {
    0.0229353220105292, 0.0630920926299786, 0.1047900103222502,
    0.1406532597155259, 0.1690047266392679, 0.1903505780647854,
    0.2044329400752989, 0.2094821410847278};
constexpr double kWg[4] = {0.1294849661688697, 0.2797053914892767,
                           0.3818300505051189, 0.4179591836734694};

struct Panel {
  double a = 0, b = 0;
  double k15 = 0, err = 0, noise = 0;
  int depth = 0;
  bool splittable = true;
};

Panel gk15(const std::function<double(double)>& f, double a, double b,
           int depth, const QuadratureOptions& opts, long& evals) {
  const double c = 0.5 * (a + b), h = 0.5 * (b - a);
  double fc = f(c);
  evals++;
  double k15 = kWgk[7] * fc, g7 = kWg[3] * fc, a15 = kWgk[7] * std::abs(fc);
  for (int i = 0; i < 7; ++i) {
    double x = h * kXgk[i];
    double f1 = f(c - x), f2 = f(c + x);
    evals += 2;
    k15 += kWgk[i] * (f1 + f2);
    a15 += kWgk[i] * (std::abs(f1) + std::abs(f2));
    if (i % 2 == 1) g7 += kWg[i / 2] * (f1 + f2);
  }
  Panel p;
  p.a = a;
  p.b = b;
  p.depth = depth;
  p.k15 = k15 * h;
  p.err = std::abs((k15 - g7) * h);
  // Below this the error estimate is rounding / integrand noise, and
  // splitting cannot improve anything.
  p.noise = 64.0 * 1.1e-16 * a15 * std::abs(h) + opts.eval_noise * (b - a);
  p.splittable = p.depth < opts.max_depth && p.err > p.noise &&
                 (b - a) > 1e-15 * (std::abs(a) + std::abs(b) + 1.0);
  return p;
}

} // namespace

QuadratureResult integrate(const std::function<double(double)>& f, double a,
                           double b, const QuadratureOptions& opts) {
  QuadratureResult out;
  out.converged = true;
  if (a == b) return out;

  std::vector<double> pts = {a, b};
  for (double s : opts.split_points)
    if (s > a && s < b) pts.push_back(s);
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());

  auto cmp = [](const Panel& x, const Panel& y) { return x.err < y.err; };
  std::priority_queue<Panel, std::vector<Panel>, decltype(cmp)> heap(cmp);
  double total = 0, total_err = 0, total_noise = 0;
  for (size_t i = 0; i + 1 < pts.size(); ++i) {
    Panel p = gk15(f, pts[i], pts[i + 1], 0, opts, out.evaluations);
    total += p.k15;
    total_err += p.err;
    total_noise += p.noise;
    heap.push(p);
  }

  long panels = long(heap.size());
  while (panels < opts.max_panels) {
    double tol = std::max({opts.abs_tol, opts.rel_tol * std::abs(total), total_noise});
    if (total_err <= tol) break;
    Panel worst = heap.top();
    if (!worst.splittable) break; // everything left is noise-limited
    heap.pop();
    total -= worst.k15;
    total_err -= worst.err;
    total_noise -= worst.noise;
    double m = 0.5 * (worst.a + worst.b);
    for (int half = 0; half < 2; ++half) {
      Panel p = gk15(f, half ? m : worst.a, half ? worst.b : m, worst.depth + 1,
                     opts, out.evaluations);
      total += p.k15;
      total_err += p.err;
      total_noise += p.noise;
      heap.push(p);
      panels++;
    }
    panels--;
  }

  out.value = total;
  out.error_estimate = total_err;
  double tol = std::max(opts.abs_tol, opts.rel_tol * std::abs(total));
  out.converged = total_err <= std::max(tol, 4.0 * total_noise) * 16.0;
  return out;
}

QuadratureResult integrate_circle(const std::function<double(double)>& f,
                                  const std::vector<double>& split_angles,
                                  const QuadratureOptions& opts) {
  const double two_pi = 6.283185307179586477;
  QuadratureOptions o = opts;
  o.split_points.clear();
  for (double t : split_angles) {
    double r = std::fmod(t, two_pi);
    if (r < 0) r += two_pi;
    o.split_points.push_back(r);
  }
  return integrate(f, 0.0, two_pi, o);
}

} // namespace speclab

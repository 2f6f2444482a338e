#include "speclab/analytic_zeros.hpp"

#include "speclab/quadrature.hpp"

#include <algorithm>
#include <cmath>

namespace speclab {

Complex PlantedProduct::evaluate(Complex z) const {
  Complex v = 1.0;
  for (const auto& zr : zeros) {
    Complex f = 1.0 - z / zr.value;
    for (int m = 0; m < zr.multiplicity; ++m) v *= f;
  }
  // Growth factor normalized so that h(0) stays 1.
  if (growth_c != 0.0)
    v *= std::exp(growth_c * (std::pow(1.0 - z, -growth_s) - 1.0));
  return v;
}

Complex PlantedProduct::derivative(Complex z) const {
  // h'/h = sum m_k * (-1/w_k) / (1 - z/w_k) + growth term.
  Complex log_deriv = 0.0;
  for (const auto& zr : zeros)
    log_deriv += double(zr.multiplicity) / (z - zr.value);
  if (growth_c != 0.0)
    log_deriv += growth_c * growth_s / std::pow(1.0 - z, growth_s + 1.0);
  return evaluate(z) * log_deriv;
}

AnalyticHandle PlantedProduct::handle() const {
  AnalyticHandle h;
  PlantedProduct self = *this;
  h.evaluate = [self](Complex z) { return self.evaluate(z); };
  h.derivative = [self](Complex z) { return self.derivative(z); };
  h.domain = DomainTag::unit_disk;
  return h;
}

std::vector<double> PlantedProduct::zero_angles() const {
  std::vector<double> angles;
  for (const auto& zr : zeros) angles.push_back(std::arg(zr.value));
  return angles;
}

int count_zeros(const AnalyticHandle& h, double r) {
  if (!(r > 0 && r < 1)) throw ParameterError("count_zeros requires r in (0,1)");
  return winding_on_circle(h, 0.0, r);
}

namespace {

std::vector<SpectrumItem> locate_zeros(const AnalyticHandle& h, double r) {
  Box box{-r, r, -r, r};
  SpectrumList found = find_zeros(h, box);
  std::vector<SpectrumItem> inside;
  for (const auto& it : found.items)
    if (std::abs(it.value) <= r) inside.push_back(it);
  return inside;
}

double circle_log_average(const AnalyticHandle& h, double r,
                          const std::vector<double>& split_angles,
                          double abs_tol) {
  QuadratureOptions opts;
  opts.abs_tol = abs_tol;
  auto res = integrate_circle(
      [&](double theta) {
        Complex z = r * std::polar(1.0, theta);
        double mod = std::abs(h(z));
        return std::log(std::max(mod, 1e-300));
      },
      split_angles, opts);
  return res.value / 6.283185307179586477;
}

} // namespace

BalanceResult jensen_balance(const AnalyticHandle& h, double r,
                             const std::vector<SpectrumItem>* known_zeros,
                             const std::vector<double>& split_angles) {
  if (!(r > 0 && r < 1)) throw ParameterError("jensen_balance requires r in (0,1)");
  if (std::abs(std::abs(h(Complex(0, 0))) - 1.0) > 1e-10)
    throw ParameterError("jensen_balance requires |h(0)| = 1");

  std::vector<SpectrumItem> zeros =
      known_zeros ? *known_zeros : locate_zeros(h, r);
  BalanceResult out;
  for (const auto& z : zeros) {
    double mod = std::abs(z.value);
    if (mod > r) continue;
    if (std::abs(mod - r) < 1e-10)
      throw ParameterError("zero lies on the integration circle");
    out.lhs += z.multiplicity * std::log(r / mod);
  }
  out.rhs = circle_log_average(h, r, split_angles, 1e-9);
  return out;
}

BalanceResult weighted_sum_balance(const AnalyticHandle& h, double q, double r_max,
                                   const std::vector<SpectrumItem>* known_zeros,
                                   const std::vector<double>& split_angles) {
  if (!(q > 1)) {
    BalanceResult bad;
    bad.inconclusive = true; // radial weight not integrable at 1
    return bad;
  }
  if (!(r_max > 0 && r_max < 1))
    throw ParameterError("r_max must lie in (0,1)");

  std::vector<SpectrumItem> zeros =
      known_zeros ? *known_zeros : locate_zeros(h, r_max);
  BalanceResult out;
  for (const auto& z : zeros) {
    double mod = std::abs(z.value);
    if (mod >= r_max)
      throw ParameterError("all zeros must lie strictly inside r_max");
    out.lhs += z.multiplicity * std::pow(1.0 - mod, q);
  }

  // [r phi'(r)]' with phi(r) = (1-r)^q.
  auto radial_weight = [q](double r) {
    return q * std::pow(1.0 - r, q - 2.0) * (r * q - 1.0);
  };

  // Numeric part on [0, r_max]: nested quadrature.  The outer
  // integrand carries the inner quadrature's tolerance as noise.
  QuadratureOptions outer_opts;
  outer_opts.abs_tol = 1e-8;
  outer_opts.eval_noise = 1e-9;
  outer_opts.split_points = {1.0 / q};
  auto outer = integrate(
      [&](double r) {
        if (r < 1e-12) return 0.0;
        return radial_weight(r) * circle_log_average(h, r, split_angles, 1e-10);
      },
      0.0, r_max, outer_opts);

  // On [r_max, 1) the annulus is zero-free and log|h| is harmonic
  // there up to the zero factors, so the circle average reduces to
  // the zero-anchored form (any normalized growth factor averages to
  // log|h(0)| = 0 by the mean value property).  Substituting u = 1-r
  // keeps the endpoint weight u^{q-2} free of cancellation.
  auto tail_integrand = [&](double u) {
    double r = 1.0 - u;
    double mean = 0.0;
    for (const auto& z : zeros) mean += z.multiplicity * std::log(r / std::abs(z.value));
    return q * std::pow(u, q - 2.0) * (r * q - 1.0) * mean;
  };
  QuadratureOptions tail_opts;
  tail_opts.abs_tol = 1e-9;
  tail_opts.max_depth = 60;
  auto tail = integrate(tail_integrand, 0.0, 1.0 - r_max, tail_opts);
  if (!tail.converged) out.inconclusive = true;

  out.tail = tail.value;
  out.rhs = outer.value + tail.value;
  return out;
}

double blaschke_type_sum(const SpectrumList& zeros, const ClassParams& params) {
  params.validate();
  double max_excess = 0.0;
  for (double b : params.beta) max_excess = std::max(max_excess, b - 1.0);
  double expo = 1.0 + params.alpha + max_excess + params.tau;
  double acc = 0.0;
  for (const auto& z : zeros.items) {
    double mod = std::abs(z.value);
    if (!(mod < 1.0)) throw ParameterError("zeros must lie in the open unit disk");
    acc += z.multiplicity * std::pow(1.0 - mod, expo);
  }
  return acc;
}

double bgk_sum(const SpectrumList& zeros, const ClassParams& params) {
  params.validate();
  double origin_expo = std::max(params.gamma - params.eps, 0.0);
  double first_expo = params.alpha > 0 ? params.alpha + 1.0 + params.tau : 1.0;
  double acc = 0.0;
  for (const auto& z : zeros.items) {
    double mod = std::abs(z.value);
    if (!(mod < 1.0)) throw ParameterError("zeros must lie in the open unit disk");
    if (mod == 0.0 && origin_expo > 0)
      throw DomainError("zero at the origin with positive origin exponent");
    double term = std::pow(1.0 - mod, first_expo);
    if (origin_expo > 0) term /= std::pow(mod, origin_expo);
    for (size_t j = 0; j < params.beta.size(); ++j) {
      double e = std::max(params.beta[j] - 1.0 + params.tau, 0.0);
      if (e > 0) term *= std::pow(std::abs(z.value - params.xi[j]), e);
    }
    acc += z.multiplicity * term;
  }
  return acc;
}

BoundReport count_bound_check(const AnalyticHandle& h, double r) {
  if (!h.class_params)
    throw ParameterError("count_bound_check requires class parameters");
  if (!(r > 0 && r <= 0.5)) throw ParameterError("count_bound_check requires r <= 1/2");
  if (std::abs(h(Complex(0, 0)) - 1.0) > 1e-10)
    throw ParameterError("growth-class handles must have h(0) = 1");
  const ClassParams& cp = *h.class_params;
  int n = count_zeros(h, r);
  double denom = cp.bigK * std::pow(r, cp.gamma);
  return make_ratio_report(
      "count-bound", "r=" + std::to_string(r) + ";gamma=" + std::to_string(cp.gamma),
      double(n), denom);
}

ClassKResult empirical_class_K(const AnalyticHandle& h, double alpha,
                               const std::vector<double>& beta, double gamma,
                               const std::vector<Complex>& xi, int n_radial,
                               int n_angular, double delta) {
  if (beta.size() != xi.size())
    throw ParameterError("beta and xi must have matching lengths");
  ClassKResult out;
  for (int i = 1; i <= n_radial; ++i) {
    double r = (1.0 - delta) * double(i) / n_radial;
    for (int k = 0; k < n_angular; ++k) {
      double theta = 6.283185307179586477 * k / n_angular;
      Complex w = r * std::polar(1.0, theta);
      out.total++;
      double mod;
      {
        Complex v = h(w);
        mod = std::abs(v);
        if (!std::isfinite(mod) || mod == 0.0) {
          out.skipped++;
          continue;
        }
      }
      double val = std::log(mod) * std::pow(1.0 - r, alpha);
      for (size_t j = 0; j < xi.size(); ++j)
        val *= std::pow(std::abs(w - xi[j]), beta[j]);
      if (gamma > 0) {
        if (r < 1e-14) continue; // |w|^gamma weight undefined at 0
        val /= std::pow(r, gamma);
      }
      if (std::isfinite(val)) out.K = std::max(out.K, val);
      else out.skipped++;
    }
  }
  out.unreliable = out.total > 0 && out.skipped * 20 > out.total;
  return out;
}

} // namespace speclab

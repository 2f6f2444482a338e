#pragma once

#include "speclab/determinants.hpp"

namespace speclab {

/// Finite product h(z) = prod_k (1 - z/w_k)^{m_k}, normalized so that
/// h(0) = 1, optionally times a zero-free boundary-growth factor
/// exp(c / (1-z)^s).  Zero locations are known by construction, which
/// is what the balance identities are tested against.
struct PlantedProduct {
  std::vector<SpectrumItem> zeros;
  double growth_c = 0.0;
  double growth_s = 1.0;

  Complex evaluate(Complex z) const;
  Complex derivative(Complex z) const;
  AnalyticHandle handle() const;
  std::vector<double> zero_angles() const;
};

/// Number of zeros of h (with multiplicity) in |z| <= r, r in (0,1).
int count_zeros(const AnalyticHandle& h, double r);

struct BalanceResult {
  double lhs = 0.0;
  double rhs = 0.0;
  double tail = 0.0; // analytically continued tail contribution
  bool inconclusive = false;
};

/// Jensen identity at radius r: sum over located zeros of log(r/|w|)
/// against the circle average of log|h|.  Zeros are located by
/// find_zeros unless supplied.
BalanceResult jensen_balance(const AnalyticHandle& h, double r,
                             const std::vector<SpectrumItem>* known_zeros = nullptr,
                             const std::vector<double>& split_angles = {});

/// Weighted zero-sum identity with phi(r) = (1-r)^q, q > 1:
/// sum (1-|w|)^q = (1/2pi) int_0^1 [r phi'(r)]' int_0^2pi log|h| dtheta dr.
/// The radial integral is evaluated numerically up to r_max and by the
/// zero-anchored closed form on [r_max, 1) (reported as tail).
BalanceResult weighted_sum_balance(const AnalyticHandle& h, double q, double r_max,
                                   const std::vector<SpectrumItem>* known_zeros = nullptr,
                                   const std::vector<double>& split_angles = {});

/// sum multiplicity * (1-|w|)^{1 + alpha + max_j (beta_j - 1)_+ + tau}.
double blaschke_type_sum(const SpectrumList& zeros, const ClassParams& params);

/// sum multiplicity * (1-|w|)^{e1} / |w|^{(gamma-eps)_+} *
/// prod_j |w - xi_j|^{(beta_j - 1 + tau)_+}, where e1 = alpha+1+tau
/// for alpha > 0 and e1 = 1 for alpha = 0.
double bgk_sum(const SpectrumList& zeros, const ClassParams& params);

/// N(h, r) / (K r^gamma) for r <= 1/2; ratio-only report.
BoundReport count_bound_check(const AnalyticHandle& h, double r);

struct ClassKResult {
  double K = 0.0;
  long skipped = 0;
  long total = 0;
  bool unreliable = false; // more than 5% of grid points skipped
};

/// Empirical class constant: max over a radial x angular grid of
/// log|h(w)| (1-|w|)^alpha prod|w-xi_j|^{beta_j} / |w|^gamma, floored
/// at 0.  The grid stops at |w| = 1 - delta.
ClassKResult empirical_class_K(const AnalyticHandle& h, double alpha,
                               const std::vector<double>& beta, double gamma,
                               const std::vector<Complex>& xi, int n_radial,
                               int n_angular, double delta = 1e-3);

} // namespace speclab

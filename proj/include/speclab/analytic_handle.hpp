#pragma once

#include "speclab/types.hpp"

#include <functional>

namespace speclab {

enum class DomainTag { unit_disk, interval_complement, halfline_complement };

/// Growth-class parameters for a function holomorphic on the unit
/// disk with h(0) = 1: log|h(w)| <= K |w|^gamma / ((1-|w|)^alpha *
/// prod_j |w - xi_j|^beta_j), plus the slack exponents tau, eps used
/// by the zero-sum bounds.
struct ClassParams {
  double alpha = 0.0;
  std::vector<double> beta;
  double gamma = 0.0;
  std::vector<Complex> xi; // pairwise distinct, unimodular
  double bigK = 0.0;
  double tau = 0.0;
  double eps = 0.0;

  void validate() const;
};

/// Evaluator for a function holomorphic on its declared domain,
/// optionally with an exact derivative and growth-class parameters.
struct AnalyticHandle {
  std::function<Complex(Complex)> evaluate;
  std::function<Complex(Complex)> derivative; // may be empty
  DomainTag domain = DomainTag::unit_disk;
  double domain_a = 0.0; // interval/halfline endpoints where relevant
  double domain_b = 0.0;
  std::optional<ClassParams> class_params;

  Complex operator()(Complex z) const { return evaluate(z); }
  bool has_derivative() const { return static_cast<bool>(derivative); }
  /// Centered-difference derivative fallback, step 1e-6 * scale.
  Complex deriv_or_fd(Complex z, double scale) const;
};

} // namespace speclab

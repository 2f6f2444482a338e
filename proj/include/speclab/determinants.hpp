#pragma once

#include "speclab/contour.hpp"
#include "speclab/linalg.hpp"

#include <map>

namespace speclab {

/// Constants Gamma_p in |det_ceil(p)(I-K)| <= exp(Gamma_p ||K||_p^p).
/// Only Gamma_1 = 1 and Gamma_2 = 1/2 are classical; other orders are
/// configuration with no default.
struct GammaTable {
  std::map<double, double> values = {{1.0, 1.0}, {2.0, 0.5}};

  double at(double p) const {
    auto it = values.find(p);
    if (it == values.end())
      throw ParameterError("no Gamma constant configured for this p");
    return it->second;
  }
  bool has(double p) const { return values.count(p) != 0; }
};

/// n-regularized determinant of I - K: product over all eigenvalues
/// of (1 - lambda) exp(sum_{j<n} lambda^j / j).
Complex regularized_det(const ComplexMatrix& K, int n);

/// det_n(I - K1 K2) and det_n(I - K2 K1); equal within 1e-9 relative.
std::pair<Complex, Complex> det_commutation_check(const ComplexMatrix& K1,
                                                  const ComplexMatrix& K2, int n);

/// |det_ceil(p)(I-K)| <= exp(Gamma_p ||K||_p^p) with the table value.
BoundReport det_growth_check(const ComplexMatrix& K, double p,
                             const GammaTable& gamma = {});

/// Exclusion region for zero searches: the essential-spectrum barrier
/// that analytic handles are defined off of.
struct ExclusionSet {
  enum class Kind { none, interval, halfline } kind = Kind::none;
  double a = 0.0, b = 0.0; // interval [a,b]; halfline [a, +inf)

  static ExclusionSet none() { return {}; }
  static ExclusionSet interval(double a, double b) {
    return {Kind::interval, a, b};
  }
  static ExclusionSet halfline(double from = 0.0) {
    return {Kind::halfline, from, 0.0};
  }

  double distance(Complex z) const;
};

/// Finitely supported perturbation: indices F where the perturbation
/// lives and its |F|x|F| block, optionally in factored form
/// M_F = M1 * M2 (then the determinant uses M2 R M1).
struct FiniteRankPerturbation {
  std::vector<long> support;
  ComplexMatrix block;
  std::optional<std::pair<ComplexMatrix, ComplexMatrix>> factors;
};

using ResolventKernel = std::function<Complex(long, long, Complex)>;

/// Perturbation determinant d(lambda) = det_ceil(p)(I_F - (M R(lambda))|_F)
/// as an analytic handle on the complement of the exclusion set.
/// d -> 1 at infinity; this is verified at |lambda| = 1e6 * scale
/// within 1e-4 on construction.
AnalyticHandle perturbation_determinant(const FiniteRankPerturbation& pert,
                                        ResolventKernel kernel, double p,
                                        const ExclusionSet& domain,
                                        double scale);

/// Order of center as a zero of h, by the argument principle on the
/// circle of the given radius.
int zero_order(const AnalyticHandle& h, Complex center, double radius);

struct FindZerosOptions {
  double guard = 1e-6;       // exclusion-set inflation margin
  double newton_tol = 1e-10; // residual |h| target
  double cluster_res = 1e-6; // zeros closer than this (times the box
                             // scale) count as one multiple zero
  double merge_tol = 1e-9;
  int max_depth = 60;
  int max_retries = 3;      // jittered retries on contour failures
  int initial_samples = 32; // base contour sampling density
  /// On an unrecoverable contour failure the whole search restarts
  /// with the guard enlarged 8x and denser base sampling, this many
  /// times.  Zeros inside the enlarged band are not reported (they sit
  /// against the exclusion set where winding counts are unreliable).
  int guard_escalations = 3;
};

/// All zeros of h in the search box (multiplicities by zero_order),
/// by recursive quadrisection on winding counts.  Boxes meeting the
/// inflated exclusion set are discarded.
SpectrumList find_zeros(const AnalyticHandle& h, const Box& search,
                        const ExclusionSet& exclusion = ExclusionSet::none(),
                        const FindZerosOptions& opts = {});

} // namespace speclab

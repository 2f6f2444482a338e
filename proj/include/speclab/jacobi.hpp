#pragma once

#include "speclab/determinants.hpp"

namespace speclab {

/// Two-sided Jacobi operator (J u)(k) = a_{k-1} u(k-1) + b_k u(k) +
/// c_k u(k+1), stored on a finite window; entries take the free
/// values (1, 0, 1) outside it.
struct JacobiSpec {
  long k_min = 0;
  long k_max = -1; // empty window when k_max < k_min
  std::vector<Complex> a, b, c;

  long window_size() const { return k_max < k_min ? 0 : k_max - k_min + 1; }
  bool in_window(long k) const { return k >= k_min && k <= k_max; }
  Complex a_at(long k) const { return in_window(k) ? a[size_t(k - k_min)] : 1.0; }
  Complex b_at(long k) const { return in_window(k) ? b[size_t(k - k_min)] : 0.0; }
  Complex c_at(long k) const { return in_window(k) ? c[size_t(k - k_min)] : 1.0; }
  void validate() const;
  JacobiSpec conjugated() const;
  bool is_free() const;
};

/// Local perturbation-size sequence v_k = max(|a_{k-1}-1|, |a_k-1|,
/// |b_k|, |c_{k-1}-1|, |c_k-1|); zero outside the inflated window.
struct VSeq {
  long k_min = 0;
  long k_max = -1;
  std::vector<double> v;

  double at(long k) const {
    return (k >= k_min && k <= k_max) ? v[size_t(k - k_min)] : 0.0;
  }
  double lp_norm(double p) const;
  double linf_norm() const;
};

/// Dirichlet truncation on indices -N..N, size (2N+1) x (2N+1).
ComplexMatrix build_truncation(const JacobiSpec& spec, long N);

VSeq v_seq(const JacobiSpec& spec);

/// J - J0 = M_{v^{1/2}} U M_{v^{1/2}} with tridiagonal U, |U entries|
/// <= 1 and ||U|| <= 3.  U lives on the inflated window.
struct JacobiFactorization {
  VSeq v_half; // square roots of v
  ComplexMatrix u;
  long k_min = 0, k_max = -1; // index range of u's rows/columns
};

JacobiFactorization factorize(const JacobiSpec& spec);

/// Green's function of the free operator: w^{|n-m|} / (1/w - w) where
/// lambda = w + 1/w, |w| < 1.  Requires lambda off [-2,2].
Complex free_jacobi_green(long n, long m, Complex lambda);

/// (J - J0) as a finite-rank perturbation on the inflated window.
FiniteRankPerturbation jacobi_perturbation(const JacobiSpec& spec);

/// Perturbation determinant of the spec against the free operator.
AnalyticHandle jacobi_determinant(const JacobiSpec& spec, double p);

struct JacobiSpectrumOptions {
  long truncation_half_width = 0; // 0 = choose from the window size
  double guard = 1e-6;
  double consistency_tol = 1e-5;
  double boundary_mass_tol = 1e-4;
  double outer_fraction = 0.1;
  bool cross_check = true;
  Box search_box{0, 0, 0, 0}; // zero box = automatic
};

struct JacobiPipelineResult {
  SpectrumList determinant_zeros;
  SpectrumList truncation;
  bool consistent = true;
  std::string report; // mismatch details when inconsistent
};

/// Both pipelines side by side: determinant zeros and the filtered
/// truncation spectrum, with the consistency comparison.
JacobiPipelineResult jacobi_spectrum_pipeline(const JacobiSpec& spec, double p,
                                              const JacobiSpectrumOptions& opts = {});

/// Discrete spectrum from the determinant-zero pipeline, cross-checked
/// against a Dirichlet truncation after filtering eigenvalues whose
/// eigenvector mass in the outer 10% of indices exceeds the threshold.
/// A mismatch beyond consistency_tol raises InconsistencyError.
SpectrumList jacobi_discrete_spectrum(const JacobiSpec& spec, double p,
                                      const JacobiSpectrumOptions& opts = {});

/// Filtered truncation spectrum (the oracle side of the pipeline).
SpectrumList truncation_spectrum(const JacobiSpec& spec, long N,
                                 double boundary_mass_tol = 1e-4,
                                 double outer_fraction = 0.1);

/// L^p(0,2pi) norm of theta -> 1/(lambda - 2 cos theta).
double jacobi_symbol_norm(Complex lambda, double p);

/// L^p(R^d) norm of x -> 1/(lambda - |x|^2), d in {1,2,3}, via the
/// radial reduction with algebraic tail truncation.  Requires
/// p > max(d/2, 1), or p = 1 with d = 1.
double laplacian_symbol_norm(Complex lambda, double p, int d);

/// ||J - J0||_Sp <= 3 ||v||_p and (p >= 1) 6^{-1/p} ||v||_p <= ||J - J0||_Sp,
/// both exact on the truncation since the perturbation is finitely
/// supported.
BoundReport schatten_equiv_check(const JacobiSpec& spec, double p);

// JSON: { "k_min", "k_max", "a": [[re,im],...], "b": ..., "c": ... }.
std::string jacobi_to_json(const JacobiSpec& spec);
JacobiSpec jacobi_from_json(const std::string& text);

} // namespace speclab

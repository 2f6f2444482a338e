#pragma once

#include "speclab/types.hpp"

#include <string>

namespace speclab {

/// All eigenvalues of A clustered within cluster_tol; multiplicities
/// sum to dim(A).  Backed by Hessenberg reduction plus shifted QR
/// (Eigen's complex Schur path); throws EigensolveError with the
/// partial state on non-convergence.
SpectrumList eigen_spectrum(const ComplexMatrix& A, double cluster_tol);

/// Default clustering scale: 1e-7 * ||A||.
double default_cluster_tol(const ComplexMatrix& A);

/// Singular values, nonnegative and nonincreasing, length dim(A).
std::vector<double> singular_values(const ComplexMatrix& A);

/// lp norm of the singular values; p = infinity gives the operator
/// norm.  Requires p > 0.
double schatten_norm(const ComplexMatrix& A, double p);

double operator_norm(const ComplexMatrix& A);

/// Convex polygon inscribed in the numerical range: vertex k is the
/// Rayleigh quotient of the top eigenvector of the Hermitian part of
/// e^{-i theta_k} A.  Angles and support values are kept so that an
/// outer (circumscribed) distance bound is also available.
struct NumRangeHull {
  std::vector<Complex> vertices; // convex position, counterclockwise
  int n_angles = 0;
  std::vector<double> angles;
  std::vector<double> support; // support[k] = max Re(e^{-i angle_k} z), z in Num
};

NumRangeHull num_range_hull(const ComplexMatrix& A, int n_angles);

/// Euclidean distance to the hull polygon (0 inside).
double dist_to_hull(Complex lambda, const NumRangeHull& hull);

/// Lower bound for dist(lambda, Num(source)) from the sampled support
/// half-planes; never exceeds the true distance.
double dist_to_numrange_lower(Complex lambda, const NumRangeHull& hull);

struct RieszOptions {
  int n_nodes = 64;
  bool adapt = true;           // double nodes until change < 1e-9
  int max_nodes = 4096;
  double spacing_factor = 10.0; // contour error if an eigenvalue is
                                // closer to the circle than this many
                                // node spacings
};

/// Riesz projection for the part of the spectrum inside the circle
/// |z - center| = radius, by trapezoid contour quadrature of the
/// resolvent.  The circle must separate that part from the rest of
/// the spectrum (checked against eigen_spectrum).
ComplexMatrix riesz_projection(const ComplexMatrix& A, Complex center,
                               double radius, const RieszOptions& opts = {});

/// Same quadrature applied to a block of probe vectors only; returns
/// the numerical rank of the projection (threshold 1e-6 relative to
/// the largest singular value).  Suitable for large matrices where
/// materializing P is too expensive.  A precomputed spectrum may be
/// supplied to skip the internal separation check.
int riesz_rank(const ComplexMatrix& A, Complex center, double radius,
               const RieszOptions& opts = {},
               const SpectrumList* known_spectrum = nullptr);

/// Numerical rank at tolerance rel_tol * (largest singular value).
int numerical_rank(const ComplexMatrix& A, double rel_tol = 1e-6);

// JSON serialization: { "dim": n, "re": [[...]], "im": [[...]] }.
std::string matrix_to_json(const ComplexMatrix& A);
ComplexMatrix matrix_from_json(const std::string& text);

std::string spectrum_to_json(const SpectrumList& s);
SpectrumList spectrum_from_json(const std::string& text);

} // namespace speclab

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "speclab/linalg.hpp"
#include "speclab/rng.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>

using namespace speclab;

namespace {

ComplexMatrix random_matrix(Rng& rng, int n, double scale = 1.0) {
  ComplexMatrix M(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) M(i, j) = scale * rng.complex_normal();
  return M / std::sqrt(double(n));
}

ComplexMatrix random_unitary(Rng& rng, int n) {
  Eigen::HouseholderQR<ComplexMatrix> qr(random_matrix(rng, n));
  return qr.householderQ() * ComplexMatrix::Identity(n, n);
}

// Characteristic polynomial coefficients by Faddeev-LeVerrier:
// det(lambda I - A) = lambda^n + c[0] lambda^{n-1} + ... + c[n-1].
std::vector<Complex> char_poly(const ComplexMatrix& A) {
  long n = A.rows();
  std::vector<Complex> c(static_cast<size_t>(n));
  ComplexMatrix M = A;
  c[0] = -M.trace();
  for (long k = 2; k <= n; ++k) {
    M = A * (M + c[size_t(k - 2)] * ComplexMatrix::Identity(n, n));
    c[size_t(k - 1)] = -M.trace() / double(k);
  }
  return c;
}

// Durand-Kerner simultaneous root iteration; the independent oracle
// for eigen_spectrum.
std::vector<Complex> durand_kerner(const std::vector<Complex>& c) {
  size_t n = c.size();
  std::vector<Complex> z(n);
  Complex seed(0.4, 0.9);
  Complex acc = 1.0;
  for (size_t i = 0; i < n; ++i) {
    acc *= seed;
    z[i] = acc;
  }
  auto eval = [&](Complex x) {
    Complex v = 1.0;
    for (size_t k = 0; k < n; ++k) v = v * x + c[k];
    return v;
  };
  for (int it = 0; it < 500; ++it) {
    double moved = 0.0;
    for (size_t i = 0; i < n; ++i) {
      Complex denom = 1.0;
      for (size_t j = 0; j < n; ++j)
        if (j != i) denom *= z[i] - z[j];
      Complex step = eval(z[i]) / denom;
      z[i] -= step;
      moved = std::max(moved, std::abs(step));
    }
    if (moved < 1e-14) break;
  }
  return z;
}

double match_distance(std::vector<Complex> a, std::vector<Complex> b) {
  // Greedy match is enough for well-separated roots.
  double worst = 0.0;
  for (Complex x : a) {
    double best = 1e300;
    size_t arg = 0;
    for (size_t j = 0; j < b.size(); ++j)
      if (std::abs(x - b[j]) < best) {
        best = std::abs(x - b[j]);
        arg = j;
      }
    worst = std::max(worst, best);
    b.erase(b.begin() + long(arg));
  }
  return worst;
}

} // namespace

TEST_CASE("eigen_spectrum: 2x2 examples and clustering") {
  ComplexMatrix Z(2, 2);
  Z << 0, 1, 0.04, 0;
  SpectrumList s = eigen_spectrum(Z, 1e-9);
  REQUIRE(s.items.size() == 2);
  CHECK(std::abs(s.items[0].value - Complex(-0.2, 0)) < 1e-12);
  CHECK(std::abs(s.items[1].value - Complex(0.2, 0)) < 1e-12);

  ComplexMatrix I3 = ComplexMatrix::Identity(3, 3);
  SpectrumList si = eigen_spectrum(I3, 1e-9);
  REQUIRE(si.items.size() == 1);
  CHECK(si.items[0].multiplicity == 3);
  CHECK(std::abs(si.items[0].value - 1.0) < 1e-14);

  CHECK_THROWS_AS(eigen_spectrum(Z, -1.0), ParameterError);
}

TEST_CASE("eigen_spectrum agrees with the characteristic-polynomial oracle") {
  Rng rng(20260808);
  ComplexMatrix A = random_matrix(rng, 4, 2.0);
  SpectrumList s = eigen_spectrum(A, 1e-12);
  std::vector<Complex> eigs;
  for (const auto& it : s.items)
    for (int m = 0; m < it.multiplicity; ++m) eigs.push_back(it.value);
  std::vector<Complex> roots = durand_kerner(char_poly(A));
  REQUIRE(eigs.size() == roots.size());
  CHECK(match_distance(eigs, roots) < 1e-8);
}

TEST_CASE("eigenpair residual target on a well-conditioned matrix") {
  Rng rng(7);
  ComplexMatrix A = random_matrix(rng, 8, 1.0);
  Eigen::ComplexEigenSolver<ComplexMatrix> es(A, true);
  double norm = operator_norm(A);
  for (long i = 0; i < 8; ++i) {
    Eigen::VectorXcd v = es.eigenvectors().col(i);
    CHECK((A * v - es.eigenvalues()(i) * v).norm() <= 1e-10 * norm);
  }
}

TEST_CASE("singular values") {
  ComplexMatrix A(2, 2);
  A << 0, 0, 0.3, 0;
  auto s = singular_values(A);
  REQUIRE(s.size() == 2);
  CHECK(s[0] == doctest::Approx(0.3).epsilon(1e-12));
  CHECK(s[1] == doctest::Approx(0.0).epsilon(1e-12));

  Rng rng(3);
  ComplexMatrix U = random_unitary(rng, 5);
  for (double sv : singular_values(U)) CHECK(sv == doctest::Approx(1.0).epsilon(1e-12));

  // Rank one u v^*: top singular value ||u|| ||v||, checked against the
  // eigenvalues of A^* A.
  Eigen::VectorXcd u(4), v(4);
  for (int i = 0; i < 4; ++i) {
    u(i) = rng.complex_normal();
    v(i) = rng.complex_normal();
  }
  ComplexMatrix R1 = u * v.adjoint();
  auto sv = singular_values(R1);
  CHECK(sv[0] == doctest::Approx(u.norm() * v.norm()).epsilon(1e-12));
  for (size_t i = 1; i < sv.size(); ++i) CHECK(sv[i] < 1e-12 * sv[0]);
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> gram(R1.adjoint() * R1);
  CHECK(std::sqrt(gram.eigenvalues().maxCoeff()) ==
        doctest::Approx(sv[0]).epsilon(1e-12));
}

TEST_CASE("schatten_norm") {
  ComplexMatrix D = ComplexMatrix::Identity(2, 2);
  CHECK(schatten_norm(D, 2.0) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-14));

  ComplexMatrix A(2, 2);
  A << 0, 0, 0.3, 0;
  for (double p : {0.5, 1.0, 2.0, 7.0})
    CHECK(schatten_norm(A, p) == doctest::Approx(0.3).epsilon(1e-12));

  Rng rng(11);
  ComplexMatrix B = random_matrix(rng, 5);
  CHECK(schatten_norm(B, 2.0) <= schatten_norm(B, 1.0) * (1 + 1e-12));
  CHECK(schatten_norm(B, std::numeric_limits<double>::infinity()) ==
        doctest::Approx(operator_norm(B)).epsilon(1e-14));
  CHECK_THROWS_AS(schatten_norm(B, 0.0), ParameterError);
  CHECK_THROWS_AS(schatten_norm(B, -1.0), ParameterError);
}

TEST_CASE("schatten properties: Weyl, Hoelder, ideal, adjoint") {
  Rng rng(23);
  for (int trial = 0; trial < 25; ++trial) {
    int n = 3 + int(rng.below(5));
    ComplexMatrix K = random_matrix(rng, n, 1.5);
    SpectrumList s = eigen_spectrum(K, 0.0);
    auto sv = singular_values(K);
    for (double p : {0.5, 1.0, 2.0}) {
      double lam_sum = 0, s_sum = 0;
      for (const auto& it : s.items)
        lam_sum += it.multiplicity * std::pow(std::abs(it.value), p);
      for (double x : sv) s_sum += std::pow(x, p);
      CHECK(lam_sum <= s_sum + 1e-9);
    }
    ComplexMatrix K2 = random_matrix(rng, n, 1.5);
    // 1/r = 1/p + 1/q with p = q = 2, r = 1
    CHECK(schatten_norm(K * K2, 1.0) <=
          schatten_norm(K, 2.0) * schatten_norm(K2, 2.0) * (1 + 1e-10));
    CHECK(schatten_norm(K * K2, 1.0) <=
          schatten_norm(K, 1.0) * operator_norm(K2) * (1 + 1e-10));
    CHECK(schatten_norm(K, 1.3) ==
          doctest::Approx(schatten_norm(ComplexMatrix(K.adjoint()), 1.3))
              .epsilon(1e-10));
  }
}

TEST_CASE("normal resolvent identity") {
  Rng rng(31);
  for (int trial = 0; trial < 10; ++trial) {
    int n = 4 + int(rng.below(4));
    ComplexMatrix Q = random_unitary(rng, n);
    Eigen::VectorXcd d(n);
    for (int i = 0; i < n; ++i) d(i) = 2.0 * rng.complex_normal();
    ComplexMatrix A = Q * d.asDiagonal() * Q.adjoint();
    Complex lambda = Complex(3.0, 2.0) + rng.complex_normal();
    double dist = 1e300;
    for (int i = 0; i < n; ++i) dist = std::min(dist, std::abs(lambda - d(i)));
    ComplexMatrix R = (lambda * ComplexMatrix::Identity(n, n) - A)
                          .partialPivLu()
                          .solve(ComplexMatrix::Identity(n, n));
    CHECK(operator_norm(R) == doctest::Approx(1.0 / dist).epsilon(1e-9));
  }
}

TEST_CASE("num_range_hull: normal cases and the shift disk") {
  ComplexMatrix D = ComplexMatrix::Zero(2, 2);
  D(1, 1) = 1.0;
  NumRangeHull seg = num_range_hull(D, 64);
  CHECK(dist_to_hull(Complex(2, 0), seg) == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(dist_to_hull(Complex(0, 1), seg) == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(dist_to_hull(Complex(0.5, 0), seg) == doctest::Approx(0.0).epsilon(1e-9));

  ComplexMatrix Di = ComplexMatrix::Zero(2, 2);
  Di(0, 0) = Complex(0, 1);
  Di(1, 1) = Complex(0, -1);
  NumRangeHull segi = num_range_hull(Di, 64);
  CHECK(dist_to_hull(Complex(1, 0), segi) == doctest::Approx(1.0).epsilon(1e-9));

  // Nilpotent shift: numerical range is the closed disk of radius 1/2.
  ComplexMatrix N(2, 2);
  N << 0, 1, 0, 0;
  NumRangeHull disk = num_range_hull(N, 16384);
  Rng rng(5);
  for (int i = 0; i < 10000; ++i) {
    Eigen::VectorXcd f(2);
    f << rng.complex_normal(), rng.complex_normal();
    f.normalize();
    Complex q = f.dot(N * f);
    CHECK(dist_to_hull(q, disk) <= 1e-8);
  }
  // Every vertex is attained (lies on the boundary circle).
  for (Complex v : disk.vertices) CHECK(std::abs(std::abs(v) - 0.5) < 1e-10);
  CHECK_THROWS_AS(num_range_hull(N, 4), ParameterError);
}

TEST_CASE("num_range_hull of a normal matrix is the hull of its spectrum") {
  Rng rng(17);
  for (int trial = 0; trial < 5; ++trial) {
    int n = 5;
    Eigen::VectorXcd d(n);
    for (int i = 0; i < n; ++i)
      d(i) = std::polar(1.0 + 0.2 * rng.uniform(),
                        6.283185307179586 * (i + 0.3 * rng.uniform()) / n);
    ComplexMatrix Q = random_unitary(rng, n);
    ComplexMatrix A = Q * d.asDiagonal() * Q.adjoint();
    NumRangeHull hull = num_range_hull(A, 512);
    // Hausdorff closeness to conv(spectrum): every eigenvalue inside
    // the hull, every vertex near an eigenvalue (all eigenvalues are
    // in convex position here).
    for (int i = 0; i < n; ++i) CHECK(dist_to_hull(d(i), hull) <= 1e-7);
    for (Complex v : hull.vertices) {
      double best = 1e300;
      for (int i = 0; i < n; ++i) best = std::min(best, std::abs(v - d(i)));
      CHECK(best <= 1e-7);
    }
  }
}

TEST_CASE("dist_to_hull: unit square corner against a boundary-sampling oracle") {
  ComplexMatrix D = ComplexMatrix::Zero(4, 4);
  D(0, 0) = 0;
  D(1, 1) = 1;
  D(2, 2) = Complex(1, 1);
  D(3, 3) = Complex(0, 1);
  NumRangeHull square = num_range_hull(D, 128);
  Complex q(2, 2);
  CHECK(dist_to_hull(q, square) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-9));
  // Dense boundary sampling oracle.
  double best = 1e300;
  const auto& v = square.vertices;
  for (size_t e = 0; e < v.size(); ++e)
    for (int k = 0; k <= 1000; ++k) {
      Complex pt = v[e] + (v[(e + 1) % v.size()] - v[e]) * (k / 1000.0);
      best = std::min(best, std::abs(q - pt));
    }
  CHECK(dist_to_hull(q, square) == doctest::Approx(best).epsilon(1e-6));
  // Support-function lower bound never exceeds the true distance.
  CHECK(dist_to_numrange_lower(q, square) <= dist_to_hull(q, square) + 1e-12);
}

TEST_CASE("riesz_projection: rank, idempotency, invariance") {
  ComplexMatrix A = ComplexMatrix::Zero(3, 3);
  A(2, 2) = 5.0;
  ComplexMatrix P = riesz_projection(A, Complex(0, 0), 1.0);
  CHECK(numerical_rank(P) == 2);
  CHECK((P * P - P).norm() <= 1e-8);

  // Jordan block: the sole eigenvalue gives P = I (trace 2).
  ComplexMatrix N(2, 2);
  N << 0, 1, 0, 0;
  ComplexMatrix PN = riesz_projection(N, Complex(0, 0), 1.0);
  CHECK(std::abs(PN.trace() - 2.0) < 1e-9);
  CHECK((PN - ComplexMatrix::Identity(2, 2)).norm() < 1e-8);

  Rng rng(41);
  ComplexMatrix B = random_matrix(rng, 6, 2.0);
  SpectrumList s = eigen_spectrum(B, default_cluster_tol(B));
  REQUIRE(s.items.size() >= 2);
  const auto& target = s.items[0];
  double gap = 1e300;
  for (size_t i = 1; i < s.items.size(); ++i)
    gap = std::min(gap, std::abs(s.items[i].value - target.value));
  ComplexMatrix PB = riesz_projection(B, target.value, 0.4 * gap);
  CHECK((PB * PB - PB).norm() <= 1e-8);
  CHECK(numerical_rank(PB) == target.multiplicity);
  ComplexMatrix I = ComplexMatrix::Identity(6, 6);
  CHECK(((I - PB) * B * PB).norm() <= 1e-7); // Ran(P) is invariant

  // Contour through the spectrum is rejected.
  CHECK_THROWS_AS(riesz_projection(A, Complex(0, 0), 5.0), ContourError);

  // Block-probe rank path agrees.
  CHECK(riesz_rank(B, target.value, 0.4 * gap) == target.multiplicity);
}

TEST_CASE("matrix and spectrum JSON round trips") {
  Rng rng(2);
  ComplexMatrix A = random_matrix(rng, 3);
  ComplexMatrix B = matrix_from_json(matrix_to_json(A));
  CHECK((A - B).norm() == 0.0);

  SpectrumList s = eigen_spectrum(A, 1e-10);
  SpectrumList t = spectrum_from_json(spectrum_to_json(s));
  REQUIRE(s.items.size() == t.items.size());
  for (size_t i = 0; i < s.items.size(); ++i) {
    CHECK(s.items[i].value == t.items[i].value);
    CHECK(s.items[i].multiplicity == t.items[i].multiplicity);
  }
  CHECK_THROWS(matrix_from_json("{\"dim\": 2, \"re\": [[0]], \"im\": [[0]]}"));
}

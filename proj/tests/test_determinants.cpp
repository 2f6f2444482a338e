#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "speclab/determinants.hpp"
#include "speclab/jacobi.hpp"
#include "speclab/rng.hpp"

#include <Eigen/LU>
#include <cmath>

using namespace speclab;

namespace {

ComplexMatrix random_matrix(Rng& rng, int n, double scale = 1.0) {
  ComplexMatrix M(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) M(i, j) = scale * rng.complex_normal();
  return M / std::sqrt(double(n));
}

AnalyticHandle poly_handle(std::vector<Complex> zeros) {
  AnalyticHandle h;
  h.evaluate = [zeros](Complex z) {
    Complex v = 1.0;
    for (Complex w : zeros) v *= z - w;
    return v;
  };
  return h;
}

} // namespace

TEST_CASE("regularized_det: definition cases") {
  ComplexMatrix Z = ComplexMatrix::Zero(3, 3);
  CHECK(std::abs(regularized_det(Z, 1) - 1.0) < 1e-14);
  CHECK(std::abs(regularized_det(Z, 3) - 1.0) < 1e-14);

  ComplexMatrix D = ComplexMatrix::Zero(3, 3);
  D(0, 0) = Complex(0.3, 0.1);
  D(1, 1) = Complex(-0.2, 0.4);
  D(2, 2) = 0.7;
  Complex want = (1.0 - D(0, 0)) * (1.0 - D(1, 1)) * (1.0 - D(2, 2));
  CHECK(std::abs(regularized_det(D, 1) - want) < 1e-14);

  ComplexMatrix S(1, 1);
  S(0, 0) = 0.5;
  CHECK(std::abs(regularized_det(S, 2) - 0.5 * std::exp(0.5)) < 1e-15);
  CHECK(regularized_det(S, 2).real() == doctest::Approx(0.824360635350064).epsilon(1e-12));

  CHECK_THROWS_AS(regularized_det(S, 0), ParameterError);
}

TEST_CASE("regularized_det equals the eigenvalue-product form") {
  Rng rng(404);
  for (int n = 1; n <= 3; ++n)
    for (int trial = 0; trial < 5; ++trial) {
      ComplexMatrix K = random_matrix(rng, 4, 1.2);
      Eigen::ComplexEigenSolver<ComplexMatrix> es(K, false);
      Complex prod = 1.0;
      for (long i = 0; i < 4; ++i) {
        Complex lam = es.eigenvalues()(i);
        Complex expo = 0.0, pw = 1.0;
        for (int j = 1; j < n; ++j) {
          pw *= lam;
          expo += pw / double(j);
        }
        prod *= (1.0 - lam) * std::exp(expo);
      }
      CHECK(std::abs(regularized_det(K, n) - prod) < 1e-10 * (1.0 + std::abs(prod)));
    }
}

TEST_CASE("det commutation") {
  Rng rng(77);
  ComplexMatrix K1 = random_matrix(rng, 3), K2 = random_matrix(rng, 3);
  for (int n : {1, 2}) {
    auto [d12, d21] = det_commutation_check(K1, K2, n);
    CHECK(std::abs(d12 - d21) <= 1e-9 * (1.0 + std::abs(d12)));
  }
  auto [a, b] = det_commutation_check(K1, ComplexMatrix::Identity(3, 3), 2);
  CHECK(std::abs(a - b) < 1e-12);
  // Rank-one K1.
  ComplexMatrix R1 = ComplexMatrix::Zero(3, 3);
  R1.col(0) = Eigen::VectorXcd::Random(3);
  auto [c, d] = det_commutation_check(R1, K2, 1);
  CHECK(std::abs(c - d) <= 1e-10 * (1.0 + std::abs(c)));
}

TEST_CASE("det growth bound") {
  ComplexMatrix Z = ComplexMatrix::Zero(2, 2);
  auto r0 = det_growth_check(Z, 1.0);
  CHECK(r0.passed());
  CHECK(r0.lhs == doctest::Approx(1.0));
  CHECK(r0.rhs_core == doctest::Approx(1.0));

  ComplexMatrix D(1, 1);
  D(0, 0) = 0.9;
  auto r1 = det_growth_check(D, 1.0);
  CHECK(r1.passed());
  CHECK(r1.lhs == doctest::Approx(0.1).epsilon(1e-12));
  CHECK(r1.rhs_core == doctest::Approx(std::exp(0.9)).epsilon(1e-12));

  Rng rng(12);
  ComplexMatrix K = 0.8 * random_matrix(rng, 5);
  CHECK(det_growth_check(K, 2.0).passed());

  GammaTable g;
  CHECK_THROWS_AS(det_growth_check(K, 1.5, g), ParameterError);
  g.values[1.5] = 1.0;
  CHECK(det_growth_check(K, 1.5, g).passed());
}

TEST_CASE("invertibility matches the smallest singular value") {
  Rng rng(21);
  for (int trial = 0; trial < 20; ++trial) {
    ComplexMatrix K = random_matrix(rng, 4, 1.0 + 2.0 * rng.uniform());
    ComplexMatrix IK = ComplexMatrix::Identity(4, 4) - K;
    double smin = singular_values(IK).back();
    double dval = std::abs(regularized_det(K, 1));
    if (smin > 1e-8) CHECK(dval > 1e-10);
    if (dval > 1e-10 * 4) CHECK(smin > 1e-12);
  }
  // Engineered near-singular instance.
  ComplexMatrix K = ComplexMatrix::Identity(3, 3);
  K(1, 1) = 1.0 - 1e-12;
  CHECK(std::abs(regularized_det(K, 1)) < 1e-10);
  CHECK(singular_values(ComplexMatrix(ComplexMatrix::Identity(3, 3) - K)).back() <
        1e-8);
}

TEST_CASE("zero_order") {
  AnalyticHandle sq;
  sq.evaluate = [](Complex z) { return z * z; };
  CHECK(zero_order(sq, 0.0, 0.5) == 2);

  Complex w0(0.3, -0.2);
  AnalyticHandle cubed;
  cubed.evaluate = [w0](Complex z) {
    Complex f = z - w0;
    return f * f * f * std::exp(z);
  };
  CHECK(zero_order(cubed, w0, 0.4) == 3);
  CHECK_THROWS_AS(zero_order(cubed, w0 + Complex(0.4, 0), 0.4), ContourError);
}

TEST_CASE("find_zeros: polynomial and planted multiplicities") {
  auto h = poly_handle({Complex(3, 0), Complex(4, 0)});
  SpectrumList z = find_zeros(h, Box{2.5, 4.5, -1.0, 1.0});
  REQUIRE(z.items.size() == 2);
  CHECK(std::abs(z.items[0].value - 3.0) < 1e-9);
  CHECK(std::abs(z.items[1].value - 4.0) < 1e-9);
  CHECK(z.items[0].multiplicity == 1);

  auto hm = poly_handle({Complex(0.5, 0.5), Complex(0.5, 0.5), Complex(-0.7, 0.1)});
  SpectrumList zm = find_zeros(hm, Box{-1.0, 1.0, -1.0, 1.0});
  REQUIRE(zm.items.size() == 2);
  CHECK(zm.items[0].multiplicity == 1);
  CHECK(zm.items[1].multiplicity == 2);
  CHECK(std::abs(zm.items[1].value - Complex(0.5, 0.5)) < 1e-7);
}

TEST_CASE("find_zeros discards the exclusion guard band") {
  // Zeros at 3 (outside) and 1 + 1e-9 i (inside the inflated interval).
  auto h = poly_handle({Complex(3, 0), Complex(1.0, 1e-9)});
  SpectrumList z =
      find_zeros(h, Box{-4.0, 4.0, -2.0, 2.0}, ExclusionSet::interval(-2.0, 2.0));
  REQUIRE(z.items.size() == 1);
  CHECK(std::abs(z.items[0].value - 3.0) < 1e-9);
}

TEST_CASE("perturbation determinant: rank-one closed form and normalization") {
  JacobiSpec spec;
  spec.k_min = 0;
  spec.k_max = 0;
  spec.a = {1.0};
  spec.b = {Complex(2.5, 0)};
  spec.c = {1.0};
  AnalyticHandle d = jacobi_determinant(spec, 1.0);
  Rng rng(5);
  for (int i = 0; i < 40; ++i) {
    Complex lam(rng.uniform(-6, 6), rng.uniform(-4, 4));
    if (ExclusionSet::interval(-2, 2).distance(lam) < 0.05) continue;
    Complex want = 1.0 - 2.5 * free_jacobi_green(0, 0, lam);
    CHECK(std::abs(d(lam) - want) <= 1e-10 * (1.0 + std::abs(want)));
  }
  CHECK_THROWS_AS(d(Complex(0.5, 0)), DomainError);

  // Zero perturbation: d is identically 1.
  FiniteRankPerturbation none;
  none.support = {0};
  none.block = ComplexMatrix::Zero(1, 1);
  AnalyticHandle d0 = perturbation_determinant(
      none, [](long, long, Complex) { return Complex(0.123, 0.4); }, 1.0,
      ExclusionSet::interval(-2, 2), 4.0);
  CHECK(std::abs(d0(Complex(5, 1)) - 1.0) < 1e-14);
}

TEST_CASE("finite-rank reduction equals a medium-truncation determinant") {
  Rng rng(9);
  JacobiSpec spec;
  spec.k_min = -1;
  spec.k_max = 1;
  for (int i = 0; i < 3; ++i) {
    spec.a.push_back(1.0 + 0.4 * rng.complex_normal());
    spec.b.push_back(0.5 * rng.complex_normal());
    spec.c.push_back(1.0 + 0.4 * rng.complex_normal());
  }
  AnalyticHandle d = jacobi_determinant(spec, 1.0);
  const long N = 90;
  ComplexMatrix J0 = build_truncation(JacobiSpec{}, N);
  ComplexMatrix D = build_truncation(spec, N) - J0;
  long dim = 2 * N + 1;
  for (Complex lam : {Complex(3.0, 0.5), Complex(-2.6, -0.4), Complex(0.3, 1.8)}) {
    ComplexMatrix R = (lam * ComplexMatrix::Identity(dim, dim) - J0)
                          .partialPivLu()
                          .solve(ComplexMatrix::Identity(dim, dim));
    Complex full = (ComplexMatrix::Identity(dim, dim) - D * R).partialPivLu().determinant();
    CHECK(std::abs(d(lam) - full) <= 1e-8 * (1.0 + std::abs(full)));
  }
}

TEST_CASE("perturbation determinant is analytic (Cauchy-Riemann residual)") {
  JacobiSpec spec;
  spec.k_min = 0;
  spec.k_max = 1;
  spec.a = {Complex(1.2, 0.1), 1.0};
  spec.b = {Complex(0.4, -0.3), Complex(0, 0.6)};
  spec.c = {1.0, Complex(0.8, 0.2)};
  AnalyticHandle d = jacobi_determinant(spec, 1.0);
  Rng rng(13);
  const double delta = 1e-5;
  int tested = 0;
  for (int i = 0; i < 400 && tested < 100; ++i) {
    Complex z(rng.uniform(-5, 5), rng.uniform(-3, 3));
    if (ExclusionSet::interval(-2, 2).distance(z) < 0.2) continue;
    tested++;
    Complex dx = (d(z + delta) - d(z - delta)) / (2 * delta);
    Complex dy = (d(z + Complex(0, delta)) - d(z - Complex(0, delta))) / (2 * delta);
    // Analytic: df/dy = i df/dx, so dx + i dy vanishes.
    CHECK(std::abs(dx + Complex(0, 1) * dy) <= 1e-6 * (1.0 + std::abs(dx)));
  }
  CHECK(tested == 100);
}

TEST_CASE("find_zeros of the rank-one determinant matches the scalar root") {
  JacobiSpec spec;
  spec.k_min = 0;
  spec.k_max = 0;
  spec.a = {1.0};
  spec.b = {2.5};
  spec.c = {1.0};
  AnalyticHandle d = jacobi_determinant(spec, 1.0);
  SpectrumList z = find_zeros(d, Box{-7, 7, -4, 4}, ExclusionSet::interval(-2, 2));
  REQUIRE(z.items.size() == 1);
  // Solve 1/w - w = 2.5 directly: lambda = sqrt(2.5^2 + 4).
  double want = std::sqrt(2.5 * 2.5 + 4.0);
  CHECK(std::abs(z.items[0].value - want) < 1e-10);
  CHECK(z.items[0].multiplicity == 1);
  CHECK(zero_order(d, z.items[0].value, 0.3) == 1);
}

#include "speclab/verify.hpp"

#include "speclab/analytic_zeros.hpp"
#include "speclab/bounds.hpp"
#include "speclab/conformal.hpp"
#include "speclab/jacobi.hpp"
#include "speclab/rng.hpp"

#include <algorithm>
#include <cmath>

namespace speclab {

namespace {

PlantedProduct random_product(Rng& rng, int max_zeros,
                              const std::vector<double>& avoid_radii) {
  PlantedProduct prod;
  int m = 1 + int(rng.below(std::uint64_t(max_zeros)));
  for (int k = 0; k < m; ++k) {
    double mod = 0;
    bool ok = false;
    while (!ok) {
      mod = rng.uniform(0.1, 0.9);
      ok = true;
      for (double r : avoid_radii)
        if (std::abs(mod - r) < 0.02) ok = false;
    }
    double ang = rng.uniform(0.0, 6.283185307179586477);
    prod.zeros.push_back({mod * std::polar(1.0, ang), 1});
  }
  return prod;
}

} // namespace

std::vector<VerifyCheck> run_verify_suite(const VerifyOptions& opts) {
  std::vector<VerifyCheck> out;
  auto want = [&opts](const std::string& g) {
    return opts.only.empty() || opts.only == g;
  };
  auto tol_or = [&opts](double dflt) {
    return opts.tolerance > 0 ? opts.tolerance : dflt;
  };
  auto add = [&out](std::string group, std::string name, double worst, double tol) {
    out.push_back({std::move(group), std::move(name), worst, tol, worst <= tol});
  };

  if (want("jensen")) {
    double tol = tol_or(1e-7);
    const double radii[] = {0.5, 0.8, 0.95};
    double worst = 0.0;
    for (int i = 0; i < 12; ++i) {
      Rng rng(opts.seed, std::uint64_t(i));
      PlantedProduct prod = random_product(rng, 5, {0.5, 0.8, 0.95});
      AnalyticHandle h = prod.handle();
      for (double r : radii) {
        auto bal = jensen_balance(h, r, &prod.zeros, prod.zero_angles());
        worst = std::max(worst, std::abs(bal.lhs - bal.rhs));
      }
    }
    add("jensen", "planted-product balance", worst, tol);
  }

  if (want("conformal")) {
    double tol = tol_or(1e-10);
    IntervalSpec iv(-2.0, 2.0);
    double worst = 0.0;
    for (int i = 0; i < 400; ++i) {
      Rng rng(opts.seed ^ 0xc0f0, std::uint64_t(i));
      Complex w = rng.unit_disk();
      if (std::abs(w) < 0.05) continue;
      for (const auto& c : conformal_identities_check(w, iv, -1.5, tol))
        if (!c.pass) worst = std::max(worst, c.rel_error);
    }
    add("conformal", "map identities", worst, tol);

    double dtol = tol_or(1e-12);
    double dworst = 0.0;
    for (int i = 0; i < 2000; ++i) {
      Rng rng(opts.seed ^ 0xd15f, std::uint64_t(i));
      Complex w = rng.unit_disk();
      if (std::abs(w) < 0.02 || std::abs(w) > 1.0 - 1e-6) continue;
      auto rep = interval_distortion_check(w, iv, dtol);
      if (!rep.passed()) dworst = std::max(dworst, 1.0);
    }
    add("conformal", "distortion constants", dworst, 0.5);
  }

  if (want("koebe")) {
    double tol = tol_or(1e-12);
    double worst = 0.0;
    for (int i = 0; i < 2000; ++i) {
      Rng rng(opts.seed ^ 0x60eb, std::uint64_t(i));
      Complex w = rng.unit_disk();
      double mod = std::abs(w);
      if (mod > 1.0 - 1e-6) continue;
      if (mod >= 0.5) {
        auto rep = koebe_check(MapKind::interval, w, -2.0, 2.0, tol);
        if (!rep.passed()) worst = std::max(worst, 1.0);
      }
      if (std::abs(w - 1.0) > 1e-3) {
        auto rep = koebe_check(MapKind::halfline, w, -1.0, 0.0, tol);
        if (!rep.passed()) worst = std::max(worst, 1.0);
      }
    }
    add("koebe", "quarter-two constants", worst, 0.5);
  }

  if (want("green")) {
    double tol = tol_or(1e-8);
    const long N = 400;
    const Complex lambdas[] = {{3.0, 0.0}, {0.0, 2.0}, {-2.5, 0.1}};
    double worst = 0.0;
    ComplexMatrix J = build_truncation(JacobiSpec{}, N);
    for (Complex lam : lambdas) {
      // Column of the Green kernel against the truncated operator.
      long dim = 2 * N + 1;
      Eigen::VectorXcd g(dim);
      for (long k = -N; k <= N; ++k) g(k + N) = free_jacobi_green(k, 0, lam);
      Eigen::VectorXcd resid = lam * g - J * g;
      resid(N) -= 1.0; // delta at the source row
      // Interior rows only: Dirichlet truncation corrupts the edges.
      long margin = N / 10;
      double r = resid.segment(margin, dim - 2 * margin).cwiseAbs().maxCoeff();
      worst = std::max(worst, r);
    }
    add("green", "resolvent column residual", worst, tol);
  }

  if (want("factorization")) {
    double tol = tol_or(1e-12);
    double worst_resid = 0.0, worst_norm = 0.0, worst_entry = 0.0;
    for (int i = 0; i < 100; ++i) {
      Rng rng(opts.seed ^ 0xfac7, std::uint64_t(i));
      EnsembleSpec e;
      e.seed = opts.seed ^ 0xfac7;
      e.support = 1 + int(rng.below(6));
      e.magnitude = rng.uniform(0.1, 2.0);
      JacobiSpec spec = random_jacobi_spec(e, std::uint64_t(i));
      JacobiFactorization f = factorize(spec);
      long N = std::max(std::labs(f.k_min), std::labs(f.k_max)) + 2;
      ComplexMatrix D =
          build_truncation(spec, N) - build_truncation(JacobiSpec{}, N);
      long dim = 2 * N + 1;
      ComplexMatrix Vh = ComplexMatrix::Zero(dim, dim);
      for (long k = -N; k <= N; ++k) Vh(k + N, k + N) = f.v_half.at(k);
      ComplexMatrix U = ComplexMatrix::Zero(dim, dim);
      for (long r = f.k_min; r <= f.k_max; ++r)
        for (long c = f.k_min; c <= f.k_max; ++c)
          U(r + N, c + N) = f.u(r - f.k_min, c - f.k_min);
      worst_resid = std::max(worst_resid, (D - Vh * U * Vh).norm());
      worst_norm = std::max(worst_norm, operator_norm(f.u) - 3.0);
      worst_entry =
          std::max(worst_entry, f.u.cwiseAbs().maxCoeff() - 1.0);
    }
    add("factorization", "reconstruction residual", worst_resid, tol);
    add("factorization", "||U|| <= 3", std::max(0.0, worst_norm), 1e-9);
    add("factorization", "|U entries| <= 1", std::max(0.0, worst_entry), 1e-12);
  }

  return out;
}

} // namespace speclab

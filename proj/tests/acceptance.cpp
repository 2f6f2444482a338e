// Acceptance suite: one line per criterion, every tolerance pinned in
// code.  Exit status is the number of failed criteria.

#include "speclab/analytic_zeros.hpp"
#include "speclab/bounds.hpp"
#include "speclab/conformal.hpp"
#include "speclab/jacobi.hpp"
#include "speclab/rng.hpp"
#include "speclab/verify.hpp"

#include <Eigen/Eigenvalues>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

using namespace speclab;
using Clock = std::chrono::steady_clock;

namespace {

int failures = 0;

void criterion(int id, const std::string& label, double time_limit_s,
               const std::function<bool(std::string&)>& body) {
  auto t0 = Clock::now();
  std::string detail;
  bool ok = false;
  try {
    ok = body(detail);
  } catch (const std::exception& e) {
    detail = std::string("exception: ") + e.what();
  }
  double elapsed = std::chrono::duration<double>(Clock::now() - t0).count();
  bool in_time = elapsed < time_limit_s;
  bool pass = ok && in_time;
  if (!pass) failures++;
  std::printf("[%s] C%02d %s (%.2fs / limit %.0fs)%s%s\n", pass ? "PASS" : "FAIL",
              id, label.c_str(), elapsed, time_limit_s,
              detail.empty() ? "" : " -- ", detail.c_str());
  std::fflush(stdout);
}

ComplexMatrix random_matrix(Rng& rng, int n, double scale = 1.0) {
  ComplexMatrix M(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) M(i, j) = scale * rng.complex_normal();
  return M / std::sqrt(double(n));
}

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", x);
  return buf;
}

} // namespace

int main() {
  std::printf("acceptance suite\n");

  criterion(1, "2x2 counterexample: exact spectra, norms, divergent ratio", 1.0,
            [](std::string& detail) {
              double prev_ratio = 0.0;
              for (double a : {1e-2, 1e-4, 1e-6}) {
                ComplexMatrix Z(2, 2), Z0(2, 2);
                Z << 0, 1, a, 0;
                Z0 << 0, 1, 0, 0;
                SpectrumList s = eigen_spectrum(Z, 1e-13);
                if (s.items.size() != 2) return false;
                double root = std::sqrt(a);
                if (std::abs(s.items[0].value - Complex(-root, 0)) > 1e-12) return false;
                if (std::abs(s.items[1].value - Complex(root, 0)) > 1e-12) return false;
                double lhs = sigma_distance_moment(Z, Z0, 1.0);
                if (std::abs(lhs - 2.0 * root) > 1e-12) return false;
                double rhs = schatten_norm(Z - Z0, 1.0);
                if (std::abs(rhs - a) > 1e-15) return false;
                double ratio = lhs / rhs;
                if (ratio <= prev_ratio) return false;
                prev_ratio = ratio;
              }
              detail = "final ratio " + std::to_string(prev_ratio);
              return true;
            });

  criterion(2, "numerical-range bound, constant 1: 1000 pairs, p in {1,2}", 60.0,
            [](std::string& detail) {
              EnsembleSpec e;
              e.kind = "matrix";
              e.n = 0; // dims vary 4..16
              e.magnitude = 1.0;
              e.count = 1000;
              e.seed = 20260808;
              long violations = 0;
              for (double p : {1.0, 2.0}) {
                e.p = p;
                auto rows = empirical_inequality_sweep("kato-numrange", e, 0, 0, 2);
                for (const auto& r : rows)
                  if (r.verdict != "pass") violations++;
              }
              detail = std::to_string(violations) + " violations / 2000";
              return violations == 0;
            });

  criterion(3, "Jensen identity: 50 planted functions, r in {0.5,0.8,0.95}", 30.0,
            [](std::string& detail) {
              double worst = 0.0;
              for (int i = 0; i < 50; ++i) {
                Rng rng(31337, std::uint64_t(i));
                PlantedProduct prod;
                int m = 1 + int(rng.below(5));
                for (int k = 0; k < m; ++k) {
                  double mod = 0.0;
                  bool clear = false;
                  while (!clear) {
                    mod = rng.uniform(0.1, 0.9);
                    clear = std::abs(mod - 0.5) > 0.02 &&
                            std::abs(mod - 0.8) > 0.02;
                  }
                  prod.zeros.push_back(
                      {mod * std::polar(1.0, rng.uniform(0, 6.28318530717958648)),
                       1 + int(rng.below(2))});
                }
                AnalyticHandle h = prod.handle();
                for (double r : {0.5, 0.8, 0.95}) {
                  auto bal = jensen_balance(h, r, &prod.zeros, prod.zero_angles());
                  worst = std::max(worst, std::abs(bal.lhs - bal.rhs));
                }
              }
              detail = "worst |lhs-rhs| = " + fmt(worst);
              return worst <= 1e-7;
            });

  criterion(4, "distortion and Koebe constants: 1e4-point sweeps per map", 10.0,
            [](std::string& detail) {
              IntervalSpec iv(-2.0, 2.0);
              long bad = 0;
              Rng rng(44);
              for (int i = 0; i < 10000; ++i) {
                double mod = rng.uniform(0.02, 1.0 - 1e-6);
                Complex w = mod * std::polar(1.0, rng.uniform(0, 6.28318530717958648));
                if (!interval_distortion_check(w, iv, 1e-12).passed()) bad++;
              }
              Rng rng2(45);
              for (int i = 0; i < 10000; ++i) {
                double mod = rng2.uniform(0.5, 1.0 - 1e-6);
                Complex w = mod * std::polar(1.0, rng2.uniform(0, 6.28318530717958648));
                if (!koebe_check(MapKind::interval, w, -2.0, 2.0, 1e-12).passed()) bad++;
              }
              Rng rng3(46);
              int done = 0;
              while (done < 10000) {
                Complex w = rng3.unit_disk();
                if (std::abs(w) > 1.0 - 1e-6 || std::abs(w - 1.0) < 1e-4) continue;
                if (!koebe_check(MapKind::halfline, w, -1.0, 0.0, 1e-12).passed()) bad++;
                done++;
              }
              detail = std::to_string(bad) + " violations / 30000";
              return bad == 0;
            });

  criterion(5, "free-operator resolvent columns at N=400", 5.0,
            [](std::string& detail) {
              const long N = 400;
              ComplexMatrix J = build_truncation(JacobiSpec{}, N);
              long dim = 2 * N + 1;
              double worst = 0.0;
              for (Complex lam : {Complex(3, 0), Complex(0, 2), Complex(-2.5, 0.1)}) {
                Eigen::VectorXcd g(dim);
                for (long k = -N; k <= N; ++k) g(k + N) = free_jacobi_green(k, 0, lam);
                Eigen::VectorXcd resid = lam * g - J * g;
                resid(N) -= 1.0;
                long margin = N / 10;
                worst = std::max(
                    worst,
                    resid.segment(margin, dim - 2 * margin).cwiseAbs().maxCoeff());
              }
              detail = "worst interior residual " + fmt(worst);
              return worst <= 1e-8;
            });

  criterion(6, "rank-one pipeline eigenvalue, order and Riesz rank at N=500", 10.0,
            [](std::string& detail) {
              JacobiSpec spec;
              spec.k_min = 0;
              spec.k_max = 0;
              spec.a = {1.0};
              spec.b = {2.5};
              spec.c = {1.0};
              JacobiSpectrumOptions opts;
              opts.truncation_half_width = 500;
              SpectrumList sd = jacobi_discrete_spectrum(spec, 1.0, opts);
              if (sd.items.size() != 1) return false;
              double oracle = std::sqrt(2.5 * 2.5 + 4.0); // 1/w - w = 2.5
              if (std::abs(sd.items[0].value - oracle) > 1e-8) return false;
              if (sd.items[0].multiplicity != 1) return false;

              AnalyticHandle d = jacobi_determinant(spec, 1.0);
              if (zero_order(d, sd.items[0].value, 0.3) != 1) return false;

              ComplexMatrix J = build_truncation(spec, 500);
              Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J.real());
              SpectrumList known;
              for (long i = 0; i < es.eigenvalues().size(); ++i)
                known.items.push_back({Complex(es.eigenvalues()(i), 0), 1});
              RieszOptions ropts;
              ropts.adapt = false;
              ropts.n_nodes = 64;
              int rank = riesz_rank(J, sd.items[0].value, 0.5, ropts, &known);
              detail = "lambda = " + std::to_string(sd.items[0].value.real()) +
                       ", riesz rank " + std::to_string(rank);
              return rank == 1;
            });

  criterion(7, "Jacobi distance-moment bound, constant 1: 300 specs, p in {1,2}",
            120.0, [](std::string& detail) {
              EnsembleSpec e;
              e.kind = "jacobi";
              e.support = 3;
              e.magnitude = 1.0;
              e.count = 300;
              e.seed = 777;
              SweepCache cache;
              long violations = 0;
              for (double p : {1.0, 2.0}) {
                e.p = p;
                auto rows = empirical_inequality_sweep("thm7.3", e, 0.5, 0.5, 2, &cache);
                for (const auto& r : rows)
                  if (r.verdict != "pass") violations++;
              }
              detail = std::to_string(violations) + " violations / 600";
              return violations == 0;
            });

  criterion(8, "tridiagonal factorization contract on 100 seeded specs", 10.0,
            [](std::string& detail) {
              double worst_resid = 0.0, worst_norm = 0.0;
              for (int i = 0; i < 100; ++i) {
                Rng rng(888, std::uint64_t(i));
                EnsembleSpec e;
                e.seed = 888;
                e.support = 1 + int(rng.below(8));
                e.magnitude = rng.uniform(0.05, 2.5);
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
                worst_norm = std::max(worst_norm, operator_norm(f.u));
              }
              detail = "worst residual " + fmt(worst_resid) + ", worst ||U|| " +
                       fmt(worst_norm);
              return worst_resid <= 1e-12 && worst_norm <= 3.0 + 1e-9;
            });

  criterion(9, "resolvent transfer: scalar grids and 8^p bound on 100 instances",
            60.0, [](std::string& detail) {
              long grid_viol = 0;
              for (double a : {-0.5, -1.0, -10.0})
                for (int i = 0; i < 100; ++i)
                  for (int j = 0; j < 100; ++j) {
                    Complex l(-20.0 + 40.0 * (i + 0.5) / 100,
                              -20.0 + 40.0 * (j + 0.5) / 100);
                    if (std::abs(l - a) < 1e-9) continue;
                    if (!resolvent_transfer_scalar(l, a)) grid_viol++;
                  }
              long full_viol = 0;
              for (int i = 0; i < 100; ++i) {
                Rng rng(909, std::uint64_t(i));
                int n = 4 + int(rng.below(6));
                ComplexMatrix H0 = ComplexMatrix::Zero(n, n);
                H0(0, 0) = 0.0;
                for (int k = 1; k < n; ++k) H0(k, k) = rng.uniform(0.0, 4.0);
                ComplexMatrix H = H0 + random_matrix(rng, n, 0.8);
                for (double p : {1.0, 2.0}) {
                  auto res = resolvent_transfer_check(H, H0, -1.0, p, 10, 10.0);
                  if (!res.full.passed()) full_viol++;
                }
              }
              detail = std::to_string(grid_viol) + " grid violations, " +
                       std::to_string(full_viol) + " bound violations";
              return grid_viol == 0 && full_viol == 0;
            });

  criterion(10, "ratio stability under ensemble doubling, tau in {0.1,0.5}", 300.0,
            [](std::string& detail) {
              struct Probe {
                const char* id;
                const char* kind;
                double p;
              };
              const Probe probes[] = {{"thm3.4", "matrix", 1.0},
                                      {"thm4.2", "matrix", 1.0},
                                      {"thm7.4", "jacobi", 1.5},
                                      {"thm6.4", "matrix", 1.0}};
              detail.clear();
              bool ok = true;
              for (const auto& pr : probes) {
                EnsembleSpec e;
                e.kind = pr.kind;
                e.n = 8;
                e.support = 3;
                e.p = pr.p;
                e.magnitude = 1.0;
                e.count = 200;
                e.seed = 1010;
                SweepCache cache;
                for (double tau : {0.1, 0.5}) {
                  e.count = 200;
                  double m200 =
                      max_ratio(empirical_inequality_sweep(pr.id, e, tau, tau, 2, &cache));
                  e.count = 400;
                  double m400 =
                      max_ratio(empirical_inequality_sweep(pr.id, e, tau, tau, 2, &cache));
                  double change = m200 > 0 ? (m400 - m200) / m200 : 0.0;
                  if (!(change < 0.20) || !std::isfinite(m400)) ok = false;
                  detail += std::string(pr.id) + "/tau=" + std::to_string(tau).substr(0, 3) +
                            ": +" + std::to_string(100.0 * change).substr(0, 4) + "% ";
                }
              }
              return ok;
            });

  criterion(11, "determinant growth bound: 1000 matrices, p in {1,2}", 30.0,
            [](std::string& detail) {
              long violations = 0;
              for (int i = 0; i < 1000; ++i) {
                Rng rng(1111, std::uint64_t(i));
                int n = 2 + int(rng.below(7));
                ComplexMatrix K = random_matrix(rng, n, rng.uniform(0.2, 2.5));
                for (double p : {1.0, 2.0})
                  if (!det_growth_check(K, p).passed()) violations++;
              }
              detail = std::to_string(violations) + " violations / 2000";
              return violations == 0;
            });

  criterion(12, "Weyl inequality and Schatten monotonicity: 1000 matrices", 30.0,
            [](std::string& detail) {
              long violations = 0;
              for (int i = 0; i < 1000; ++i) {
                Rng rng(1212, std::uint64_t(i));
                int n = 2 + int(rng.below(7));
                ComplexMatrix K = random_matrix(rng, n, rng.uniform(0.2, 3.0));
                SpectrumList s = eigen_spectrum(K, 0.0);
                auto sv = singular_values(K);
                double s1 = schatten_norm(K, 1.0);
                double s2 = schatten_norm(K, 2.0);
                if (s2 > s1 * (1.0 + 1e-12)) violations++;
                for (double p : {0.5, 1.0, 2.0}) {
                  double lam_sum = 0, sv_sum = 0;
                  for (const auto& it : s.items)
                    lam_sum += it.multiplicity * std::pow(std::abs(it.value), p);
                  for (double x : sv) sv_sum += std::pow(x, p);
                  if (lam_sum > sv_sum + 1e-9) violations++;
                }
              }
              detail = std::to_string(violations) + " violations";
              return violations == 0;
            });

  std::printf("acceptance: %d of 12 criteria failed\n", failures);
  return failures;
}

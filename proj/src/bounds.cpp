#include "speclab/bounds.hpp"

#include "speclab/analytic_zeros.hpp"
#include "speclab/conformal.hpp"
#include "speclab/rng.hpp"

#include <json.hpp>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <functional>
#include <mutex>
#include <thread>

namespace speclab {

namespace {

double pos(double x) { return x > 0 ? x : 0.0; }

std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

} // namespace

MomentWeightSpec MomentWeightSpec::interval_from_hypothesis(double alpha,
                                                            double beta, double tau,
                                                            double a, double b) {
  MomentWeightSpec w;
  w.family = Family::interval;
  w.alpha = alpha;
  w.beta = beta;
  w.tau = tau;
  w.eta1 = alpha + 1.0 + tau;
  w.eta2 = pos(alpha - 2.0 * beta - 1.0 + tau);
  w.a = a;
  w.b = b;
  return w;
}

MomentWeightSpec MomentWeightSpec::interval_direct(double eta1, double eta2,
                                                   double a, double b) {
  MomentWeightSpec w;
  w.family = Family::interval;
  w.eta1 = eta1;
  w.eta2 = eta2;
  w.a = a;
  w.b = b;
  return w;
}

MomentWeightSpec MomentWeightSpec::halfline_thm45(double alpha, double beta,
                                                  double p, double tau, double eps,
                                                  double a) {
  if (!(a < 0)) throw ParameterError("halfline family requires a < 0");
  MomentWeightSpec w;
  w.family = Family::halfline_thm45;
  w.alpha = alpha;
  w.beta = beta;
  w.p = p;
  w.tau = tau;
  w.eta1 = alpha + 1.0 + tau;
  w.eta2 = pos(pos(alpha - 2.0 * beta) - 1.0 + tau);
  w.eta3 = pos(pos(2.0 * p - 3.0 * alpha + 2.0 * beta) - 1.0 + tau);
  w.eta4 = pos(p - eps);
  w.a = a;
  return w;
}

MomentWeightSpec MomentWeightSpec::halfline_cor3(double alpha, double beta,
                                                 double tau, double omega, double s) {
  MomentWeightSpec w;
  w.family = Family::halfline_cor3;
  w.alpha = alpha;
  w.beta = beta;
  w.tau = tau;
  w.eta0 = -alpha + beta + tau;
  w.eta1 = alpha + 1.0 + tau;
  w.eta2 = pos(pos(alpha - 2.0 * beta) - 1.0 + tau);
  w.omega = omega;
  w.s = s;
  if (omega == 0 && !(s > 0)) throw ParameterError("omega = 0 requires s > 0");
  return w;
}

MomentWeightSpec MomentWeightSpec::halfline_num(double p, double a) {
  if (!(a < 0)) throw ParameterError("halfline family requires a < 0");
  MomentWeightSpec w;
  w.family = Family::halfline_num;
  w.p = p;
  w.a = a;
  return w;
}

MomentWeightSpec MomentWeightSpec::halfline_num2(double p, double alpha, double beta,
                                                 double omega, double s, double tau) {
  MomentWeightSpec w;
  w.family = Family::halfline_num2;
  w.p = p;
  w.alpha = alpha;
  w.beta = beta;
  w.omega = omega;
  w.s = s;
  w.tau = tau;
  if (omega == 0 && !(s > 0)) throw ParameterError("omega = 0 requires s > 0");
  return w;
}

MomentWeightSpec MomentWeightSpec::lt_classical(double p, double d) {
  MomentWeightSpec w;
  w.family = Family::lt_classical;
  w.p = p;
  w.d = d;
  return w;
}

MomentWeightSpec MomentWeightSpec::lt_sector(double p, double d, double chi) {
  if (!(chi > 0)) throw ParameterError("sector family requires chi > 0");
  MomentWeightSpec w;
  w.family = Family::lt_sector;
  w.p = p;
  w.d = d;
  w.chi = chi;
  return w;
}

MomentWeightSpec MomentWeightSpec::lt_laptev(double p, double d) {
  MomentWeightSpec w;
  w.family = Family::lt_laptev;
  w.p = p;
  w.d = d;
  return w;
}

MomentWeightSpec MomentWeightSpec::lt_goal(double p, double d) {
  MomentWeightSpec w;
  w.family = Family::lt_goal;
  w.p = p;
  w.d = d;
  return w;
}

double MomentWeightSpec::weight(Complex l) const {
  switch (family) {
    case Family::interval: {
      IntervalSpec iv(a, b);
      double dist = dist_interval(l, iv);
      if (dist == 0.0) return 0.0;
      double denom = std::abs(l - Complex(b, 0)) * std::abs(l - Complex(a, 0));
      return std::pow(dist, eta1) / std::pow(denom, 0.5 * (eta1 - eta2));
    }
    case Family::halfline_thm45: {
      double dist = dist_halfline(l);
      if (dist == 0.0) return 0.0;
      double la = std::abs(l - Complex(a, 0));
      if (la == 0.0 && eta4 > 0)
        throw DomainError("weight singularity hit exactly at lambda = a");
      double denom = std::pow(std::abs(l), 0.5 * (eta1 - eta2)) *
                     std::pow(std::abs(l) + std::abs(a), eta1 - eta4 + 0.5 * (eta2 + eta3));
      if (eta4 > 0) denom *= std::pow(la, eta4);
      return std::pow(dist, eta1) / denom;
    }
    case Family::halfline_cor3: {
      double dist = dist_halfline(l);
      if (dist == 0.0) return 0.0;
      if (omega < 0) {
        double denom = std::pow(std::abs(l), 0.5 * (eta1 - eta2)) *
                       std::pow(std::abs(l) + std::abs(omega), eta0 + 0.5 * (eta1 + eta2));
        return std::pow(dist, eta1) / denom;
      }
      double al = std::abs(l);
      if (al > s)
        return std::pow(dist, eta1) / std::pow(al, eta0 + eta1);
      return std::pow(dist, eta1) /
             (std::pow(al, eta0 + eta1 - 2.0 * tau) * std::pow(s, 2.0 * tau));
    }
    case Family::halfline_num: {
      double dist = dist_halfline(l);
      if (dist == 0.0) return 0.0;
      // |l - a| = |l + |a||; the weight with |l - |a|| instead is
      // falsified by 1x1 instances (see the resolvent-transfer notes).
      double la = std::abs(l - a);
      if (la == 0.0) throw DomainError("weight singularity hit exactly at lambda = a");
      double denom = std::pow(la, p) * std::pow(std::abs(l) + std::abs(a), p);
      return std::pow(dist, p) / denom;
    }
    case Family::halfline_num2: {
      double dist = dist_halfline(l);
      if (dist == 0.0) return 0.0;
      if (omega < 0)
        return std::pow(dist, p) *
               std::pow(std::abs(l) + std::abs(omega), alpha + beta - 2.0 * p - tau);
      double al = std::abs(l);
      if (al > s)
        return std::pow(dist, p) / std::pow(al, -alpha - beta + 2.0 * p + tau);
      return std::pow(dist, p) /
             (std::pow(al, -alpha - beta + 2.0 * p - tau) * std::pow(s, 2.0 * tau));
    }
    case Family::lt_classical: {
      if (!(l.real() < 0)) return 0.0;
      return std::pow(std::abs(l), p - 0.5 * d);
    }
    case Family::lt_sector: {
      if (std::abs(l) < 1e-300) return 0.0;
      if (!(std::abs(l.imag()) >= chi * l.real())) return 0.0;
      return std::pow(std::abs(l), p - 0.5 * d);
    }
    case Family::lt_laptev: {
      if (!(l.real() >= 0)) return 0.0;
      double denom = std::norm(l + 1.0) + 1.0;
      return std::pow(std::abs(l.imag()) / denom, p);
    }
    case Family::lt_goal: {
      double dist = dist_halfline(l);
      if (dist == 0.0) return 0.0;
      return std::pow(dist, p) / std::pow(std::abs(l), 0.5 * d);
    }
  }
  return 0.0;
}

double moment_sum(const SpectrumList& spectrum, const MomentWeightSpec& w) {
  double acc = 0.0;
  for (const auto& it : spectrum.items) acc += it.multiplicity * w.weight(it.value);
  return acc;
}

BoundReport kato_numrange_check(const ComplexMatrix& Z, const ComplexMatrix& Z0,
                                double p, const KatoOptions& opts) {
  if (!(p >= 1)) throw ParameterError("kato_numrange_check requires p >= 1");
  SpectrumList spec = eigen_spectrum(Z, default_cluster_tol(Z));
  double rhs = std::pow(schatten_norm(Z - Z0, p), p);

  // For Hermitian Z0 the hull degenerates to [min, max] eigenvalue and
  // the distance sum doubles as the spectrum-interval variant.
  std::string note;
  if (opts.sigma_distance_variant && Z0.isApprox(Z0.adjoint(), 1e-13)) {
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(Z0);
    IntervalSpec iv(es.eigenvalues().minCoeff() - 1e-15,
                    es.eigenvalues().maxCoeff() + 1e-15);
    double variant = 0;
    for (const auto& it : spec.items)
      variant += it.multiplicity * std::pow(dist_interval(it.value, iv), p);
    note = "sigma-interval variant lhs=" + fmt(variant);
  }

  int n = opts.n_angles;
  double lhs_in = 0, lhs_out = 0;
  while (true) {
    NumRangeHull hull = num_range_hull(Z0, n);
    lhs_in = lhs_out = 0;
    for (const auto& it : spec.items) {
      lhs_in += it.multiplicity * std::pow(dist_to_hull(it.value, hull), p);
      lhs_out +=
          it.multiplicity * std::pow(dist_to_numrange_lower(it.value, hull), p);
    }
    if (lhs_in <= rhs * (1.0 + opts.rel_tol) + 1e-300) {
      return make_explicit_report("kato-numrange", "p=" + fmt(p), lhs_in, rhs, 1.0,
                                  opts.rel_tol, note);
    }
    if (lhs_out > rhs * (1.0 + opts.rel_tol)) {
      // The circumscribed bound already exceeds the norm: a genuine
      // violation, not hull discretization.
      return make_explicit_report("kato-numrange", "p=" + fmt(p), lhs_out, rhs, 1.0,
                                  opts.rel_tol, "violation of the outer bound");
    }
    if (2 * n > opts.max_angles) {
      auto r = make_explicit_report("kato-numrange", "p=" + fmt(p), lhs_in, rhs, 1.0,
                                    opts.rel_tol,
                                    "indeterminate within hull discretization gap");
      return r;
    }
    n *= 2;
  }
}

double sigma_distance_moment(const ComplexMatrix& Z, const ComplexMatrix& Z0,
                             double p) {
  SpectrumList spec = eigen_spectrum(Z, default_cluster_tol(Z));
  SpectrumList spec0 = eigen_spectrum(Z0, default_cluster_tol(Z0));
  double acc = 0.0;
  for (const auto& it : spec.items) {
    double d = std::numeric_limits<double>::infinity();
    for (const auto& s0 : spec0.items) d = std::min(d, std::abs(it.value - s0.value));
    acc += it.multiplicity * std::pow(d, p);
  }
  return acc;
}

BoundReport schur_trace_check(const ComplexMatrix& Z, const ComplexMatrix& Z0,
                              const std::vector<Complex>& lambda_subset, double p) {
  if (!(p >= 1)) throw ParameterError("schur_trace_check requires p >= 1");
  SpectrumList spec = eigen_spectrum(Z, default_cluster_tol(Z));
  long n = Z.rows();

  // Sum the Riesz projections of the selected eigenvalue clusters.
  ComplexMatrix P = ComplexMatrix::Zero(n, n);
  int expected = 0;
  for (Complex l0 : lambda_subset) {
    const SpectrumItem* match = nullptr;
    double best = std::numeric_limits<double>::infinity();
    for (const auto& it : spec.items) {
      double d = std::abs(it.value - l0);
      if (d < best) {
        best = d;
        match = &it;
      }
    }
    if (!match || best > 1e-6 * (1.0 + std::abs(l0)))
      throw ParameterError("requested eigenvalue not present in the spectrum");
    double gap = std::numeric_limits<double>::infinity();
    for (const auto& it : spec.items)
      if (&it != match) gap = std::min(gap, std::abs(it.value - match->value));
    double radius = std::isfinite(gap) ? 0.33 * gap : 0.5;
    P += riesz_projection(Z, match->value, radius);
    expected += match->multiplicity;
  }

  Eigen::ColPivHouseholderQR<ComplexMatrix> qr(P);
  qr.setThreshold(1e-7);
  int rank = int(qr.rank());
  if (rank != expected)
    throw InconsistencyError("projection rank " + std::to_string(rank) +
                             " does not match total multiplicity " +
                             std::to_string(expected));
  ComplexMatrix Q = qr.householderQ() * ComplexMatrix::Identity(n, rank);

  ComplexMatrix B = Q.adjoint() * Z * Q;
  Eigen::ComplexSchur<ComplexMatrix> schur(B, true);
  ComplexMatrix T = schur.matrixT();
  ComplexMatrix E = Q * schur.matrixU(); // Schur basis of Ran(P)

  // Diagonal must reproduce the selected eigenvalues with multiplicity.
  std::vector<Complex> diag, want;
  for (int i = 0; i < rank; ++i) diag.push_back(T(i, i));
  for (Complex l0 : lambda_subset)
    for (const auto& it : spec.items)
      if (std::abs(it.value - l0) <= 1e-6 * (1.0 + std::abs(l0)))
        for (int m = 0; m < it.multiplicity; ++m) want.push_back(it.value);
  auto key = [](Complex x, Complex y) {
    if (x.real() != y.real()) return x.real() < y.real();
    return x.imag() < y.imag();
  };
  std::sort(diag.begin(), diag.end(), key);
  std::sort(want.begin(), want.end(), key);
  bool diag_ok = diag.size() == want.size();
  for (size_t i = 0; diag_ok && i < diag.size(); ++i)
    diag_ok = std::abs(diag[i] - want[i]) <= 1e-6 * (1.0 + std::abs(want[i]));

  double lhs = 0.0;
  for (int i = 0; i < rank; ++i) {
    Eigen::VectorXcd e = E.col(i);
    lhs += std::pow(std::abs(e.dot((Z - Z0) * e)), p);
  }
  double rhs = std::pow(schatten_norm(Z - Z0, p), p);
  double invariance = ((ComplexMatrix::Identity(n, n) - Q * Q.adjoint()) * Z * Q).norm();
  auto r = make_explicit_report("schur-trace", "p=" + fmt(p), lhs, rhs, 1.0, 1e-8,
                                "invariance residual " + fmt(invariance));
  if (!diag_ok) {
    r.verdict = BoundReport::Verdict::fail;
    r.note += "; Schur diagonal does not reproduce the eigenvalues";
  }
  return r;
}

BoundReport ouhabaz_check(const ComplexMatrix& H, double p) {
  if (!(p >= 1)) throw ParameterError("ouhabaz_check requires p >= 1");
  ComplexMatrix re = 0.5 * (H + H.adjoint());
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(re);
  double rhs = 0.0;
  for (long i = 0; i < es.eigenvalues().size(); ++i)
    rhs += std::pow(pos(-es.eigenvalues()(i)), p);
  SpectrumList spec = eigen_spectrum(H, default_cluster_tol(H));
  double lhs = 0.0;
  for (const auto& it : spec.items)
    if (it.value.real() < 0)
      lhs += it.multiplicity * std::pow(-it.value.real(), p);
  return make_explicit_report("real-part-moment", "p=" + fmt(p), lhs, rhs, 1.0, 1e-8);
}

bool resolvent_transfer_scalar(Complex lambda, double a, double* margin) {
  double dist = dist_halfline(lambda);
  double rhs = 0.125 * dist /
               (std::abs(lambda - a) * (std::abs(lambda) + std::abs(a)));
  Complex mu = 1.0 / (a - lambda);
  double lhs = dist_interval(mu, IntervalSpec(1.0 / a, 0.0));
  if (margin) *margin = rhs > 0 ? lhs / rhs : std::numeric_limits<double>::infinity();
  return lhs + 1e-300 >= rhs * (1.0 - 1e-12);
}

ResolventTransferResult resolvent_transfer_check(const ComplexMatrix& H,
                                                 const ComplexMatrix& H0, double a,
                                                 double p, int grid_side,
                                                 double grid_extent) {
  if (!(a < 0)) throw ParameterError("resolvent transfer requires a < 0");
  if (!(p >= 1)) throw ParameterError("resolvent transfer requires p >= 1");
  SpectrumList spec = eigen_spectrum(H, default_cluster_tol(H));
  for (const auto& it : spec.items)
    if (std::abs(it.value - a) < 1e-10)
      throw DomainError("a lies within 1e-10 of the spectrum of H");

  long n = H.rows();
  ComplexMatrix id = ComplexMatrix::Identity(n, n);
  ComplexMatrix RH = (a * id - H).partialPivLu().solve(id);
  ComplexMatrix RH0 = (a * id - H0).partialPivLu().solve(id);
  double rhs_core = std::pow(schatten_norm(RH - RH0, p), p);

  double lhs = moment_sum(spec, MomentWeightSpec::halfline_num(p, a));
  ResolventTransferResult out;
  out.full = make_explicit_report(
      "resolvent-transfer", "p=" + fmt(p) + ";a=" + fmt(a), lhs, rhs_core,
      std::pow(8.0, p), 1e-8,
      "dist to [0,inf) used as a lower bound for dist to sigma(H0)");

  out.worst_margin = std::numeric_limits<double>::infinity();
  for (int i = 0; i < grid_side; ++i)
    for (int j = 0; j < grid_side; ++j) {
      Complex l(-grid_extent + 2.0 * grid_extent * (i + 0.5) / grid_side,
                -grid_extent + 2.0 * grid_extent * (j + 0.5) / grid_side);
      if (std::abs(l - a) < 1e-9) continue;
      out.grid_points++;
      double margin;
      if (!resolvent_transfer_scalar(l, a, &margin)) out.grid_violations++;
      if (std::isfinite(margin)) out.worst_margin = std::min(out.worst_margin, margin);
    }
  return out;
}

std::string ensemble_to_json(const EnsembleSpec& e) {
  nlohmann::json j;
  j["kind"] = e.kind;
  j["n"] = e.n;
  j["support"] = e.support;
  j["p"] = e.p;
  j["magnitude"] = e.magnitude;
  j["count"] = e.count;
  j["seed"] = e.seed;
  return j.dump(2);
}

EnsembleSpec ensemble_from_json(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  EnsembleSpec e;
  e.kind = j.value("kind", "jacobi");
  e.n = j.value("n", 8);
  e.support = j.value("support", 3);
  e.p = j.value("p", 1.0);
  e.magnitude = j.value("magnitude", 1.0);
  e.count = j.value("count", 100);
  e.seed = j.value("seed", std::uint64_t(1));
  if (e.kind != "jacobi" && e.kind != "matrix")
    throw ParameterError("ensemble kind must be jacobi or matrix");
  return e;
}

JacobiSpec random_jacobi_spec(const EnsembleSpec& e, std::uint64_t index) {
  Rng rng(e.seed, index);
  JacobiSpec s;
  long w = std::max(1, e.support);
  s.k_min = -w / 2;
  s.k_max = s.k_min + w - 1;
  for (long k = 0; k < w; ++k) {
    s.a.push_back(1.0 + e.magnitude * rng.unit_disk());
    s.b.push_back(e.magnitude * rng.unit_disk());
    s.c.push_back(1.0 + e.magnitude * rng.unit_disk());
  }
  return s;
}

namespace {

ComplexMatrix random_matrix(Rng& rng, int n, double scale) {
  ComplexMatrix M(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) M(i, j) = scale * rng.complex_normal();
  return M / std::sqrt(double(n));
}

ComplexMatrix random_unitary(Rng& rng, int n) {
  ComplexMatrix G = random_matrix(rng, n, 1.0);
  Eigen::HouseholderQR<ComplexMatrix> qr(G);
  return qr.householderQ() * ComplexMatrix::Identity(n, n);
}

// Hermitian with eigenvalues filling [a,b] (endpoints pinned).
ComplexMatrix random_hermitian_interval(Rng& rng, int n, double a, double b) {
  Eigen::VectorXd d(n);
  d(0) = a;
  d(n - 1) = b;
  for (int i = 1; i + 1 < n; ++i) d(i) = rng.uniform(a, b);
  ComplexMatrix Q = random_unitary(rng, n);
  return Q * d.cast<Complex>().asDiagonal() * Q.adjoint();
}

ComplexMatrix random_psd_diag(Rng& rng, int n, double top) {
  Eigen::VectorXd d(n);
  d(0) = 0.0;
  for (int i = 1; i < n; ++i) d(i) = rng.uniform(0.0, top);
  ComplexMatrix M = ComplexMatrix::Zero(n, n);
  for (int i = 0; i < n; ++i) M(i, i) = d(i);
  return M;
}

int instance_dim(const EnsembleSpec& e, std::uint64_t idx) {
  if (e.n > 0) return e.n;
  return 4 + int(idx % 13); // dims 4..16
}

void run_parallel(int count, int jobs, const std::function<void(int)>& body) {
  jobs = std::max(1, jobs);
  if (jobs == 1) {
    for (int i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  std::exception_ptr first_error;
  std::mutex err_mutex;
  for (int t = 0; t < jobs; ++t)
    pool.emplace_back([&]() {
      while (true) {
        int i = next.fetch_add(1);
        if (i >= count) return;
        try {
          body(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(err_mutex);
          if (!first_error) first_error = std::current_exception();
        }
      }
    });
  for (auto& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);
}

RatioRow base_row(const std::string& id, std::uint64_t idx, int n, double p,
                  double tau) {
  RatioRow r;
  r.theorem_id = id;
  r.seed_index = idx;
  r.n = n;
  r.p = p;
  r.tau = tau;
  return r;
}

void fill_ratio(RatioRow& r, double lhs, double rhs_core) {
  r.lhs = lhs;
  r.rhs_core = rhs_core;
  r.ratio = rhs_core > 0 ? lhs / rhs_core
                         : (lhs > 0 ? std::numeric_limits<double>::infinity() : 0.0);
  r.verdict = "ratio-only";
}

void fill_explicit(RatioRow& r, double lhs, double rhs_core, double constant,
                   double tol) {
  r.lhs = lhs;
  r.rhs_core = rhs_core;
  r.explicit_constant = constant;
  double rhs = rhs_core * constant;
  r.ratio = rhs > 0 ? lhs / rhs : (lhs > 0 ? std::numeric_limits<double>::infinity() : 0.0);
  r.verdict = lhs <= rhs * (1.0 + tol) + 1e-300 ? "pass" : "fail";
}

// Discrete spectrum of a Jacobi ensemble instance, sized for sweeps.
SpectrumList sweep_jacobi_spectrum(const JacobiSpec& spec, double p) {
  JacobiSpectrumOptions opts;
  opts.truncation_half_width = 60 + 4 * spec.window_size();
  try {
    return jacobi_discrete_spectrum(spec, p, opts);
  } catch (const InconsistencyError&) {
    opts.truncation_half_width *= 2; // slow eigenvector decay; retry larger
    return jacobi_discrete_spectrum(spec, p, opts);
  }
}

struct JacobiInstance {
  JacobiSpec spec;
  SpectrumList spectrum;
  double v_norm_p;
};

JacobiInstance make_jacobi_instance(const EnsembleSpec& e, std::uint64_t idx,
                                    double p, SweepCache* cache) {
  JacobiInstance inst;
  inst.spec = random_jacobi_spec(e, idx);
  inst.v_norm_p = v_seq(inst.spec).lp_norm(p);
  if (cache) {
    std::lock_guard<std::mutex> lock(cache->mutex);
    auto it = cache->spectra.find(idx);
    if (it != cache->spectra.end()) {
      inst.spectrum = it->second;
      return inst;
    }
  }
  inst.spectrum = sweep_jacobi_spectrum(inst.spec, p);
  if (cache) {
    std::lock_guard<std::mutex> lock(cache->mutex);
    cache->spectra.emplace(idx, inst.spectrum);
  }
  return inst;
}

} // namespace

std::vector<RatioRow> empirical_inequality_sweep(const std::string& theorem_id,
                                                 const EnsembleSpec& ensemble,
                                                 double tau, double eps, int jobs,
                                                 SweepCache* cache) {
  const int count = ensemble.count;
  std::vector<RatioRow> rows(size_t(std::max(0, count)));
  const double p = ensemble.p;

  if (theorem_id == "thm7.3" || theorem_id == "thm7.2" || theorem_id == "thm7.4") {
    run_parallel(count, jobs, [&](int i) {
      auto idx = std::uint64_t(i);
      JacobiInstance inst = make_jacobi_instance(ensemble, idx, p, cache);
      RatioRow r = base_row(theorem_id, idx, int(inst.spec.window_size()), p, tau);
      double K = std::pow(inst.v_norm_p, p);
      if (theorem_id == "thm7.3") {
        double lhs = moment_sum(inst.spectrum,
                                MomentWeightSpec::interval_direct(p, p, -2.0, 2.0));
        fill_explicit(r, lhs, K, 1.0, 1e-8);
      } else if (theorem_id == "thm7.2") {
        MomentWeightSpec w =
            p >= 1.0 - tau
                ? MomentWeightSpec::interval_direct(p + 1.0 + tau, pos(p - 1.0 + tau),
                                                    -2.0, 2.0)
                : MomentWeightSpec::interval_direct(p + 1.0 + tau, 0.0, -2.0, 2.0);
        fill_ratio(r, moment_sum(inst.spectrum, w), K);
      } else {
        MomentWeightSpec w =
            p > 1.0 ? MomentWeightSpec::interval_direct(p + tau, p - 1.0 + tau, -2.0,
                                                        2.0)
                    : MomentWeightSpec::interval_direct(1.0 + tau, 0.5 * tau, -2.0,
                                                        2.0);
        fill_ratio(r, moment_sum(inst.spectrum, w), K);
      }
      rows[size_t(i)] = r;
    });
  } else if (theorem_id == "thm4.2") {
    run_parallel(count, jobs, [&](int i) {
      auto idx = std::uint64_t(i);
      Rng rng(ensemble.seed, idx);
      int n = instance_dim(ensemble, idx);
      const double a = -2.0, b = 2.0;
      ComplexMatrix A0 = random_hermitian_interval(rng, n, a, b);
      ComplexMatrix M = ensemble.magnitude * random_matrix(rng, n, 1.0);
      // Split M through its SVD so that a genuine two-sided
      // factorization M = M1 M2 is exercised.
      Eigen::BDCSVD<ComplexMatrix> svd(M, Eigen::ComputeFullU | Eigen::ComputeFullV);
      Eigen::VectorXd sqrt_s = svd.singularValues().cwiseSqrt();
      ComplexMatrix M1 = svd.matrixU() * sqrt_s.cast<Complex>().asDiagonal();
      ComplexMatrix M2 = sqrt_s.cast<Complex>().asDiagonal() * svd.matrixV().adjoint();

      // Hypothesis constant over the mapped w-grid.
      const double alpha = p, beta = 0.0;
      IntervalSpec iv(a, b);
      double K = -1.0;
      if (cache) {
        std::lock_guard<std::mutex> lock(cache->mutex);
        auto it = cache->hypothesis_K.find(idx);
        if (it != cache->hypothesis_K.end()) K = it->second;
      }
      if (K < 0) {
        K = 0.0;
        ComplexMatrix id = ComplexMatrix::Identity(n, n);
        for (int ir = 1; ir <= 40; ++ir) {
          double radius = (1.0 - 1e-3) * ir / 40.0;
          if (radius < 0.02) continue;
          for (int ia = 0; ia < 64; ++ia) {
            Complex w = radius * std::polar(1.0, 6.283185307179586477 * ia / 64.0);
            Complex l = interval_map(w, iv);
            ComplexMatrix R = (l * id - A0).partialPivLu().solve(id);
            double val = std::pow(schatten_norm(M2 * R * M1, p), p) *
                         std::pow(dist_interval(l, iv), alpha);
            K = std::max(K, val);
          }
        }
        if (cache) {
          std::lock_guard<std::mutex> lock(cache->mutex);
          cache->hypothesis_K.emplace(idx, K);
        }
      }
      MomentWeightSpec wspec =
          MomentWeightSpec::interval_from_hypothesis(alpha, beta, tau, a, b);
      SpectrumList spec = eigen_spectrum(A0 + M, default_cluster_tol(A0 + M));
      double lhs = moment_sum(spec, wspec);
      double rhs_core = std::pow(b - a, wspec.eta2 - alpha + 2.0 * beta) * K;
      RatioRow r = base_row(theorem_id, idx, n, p, tau);
      fill_ratio(r, lhs, rhs_core);
      rows[size_t(i)] = r;
    });
  } else if (theorem_id == "thm3.4") {
    run_parallel(count, jobs, [&](int i) {
      auto idx = std::uint64_t(i);
      Rng rng(ensemble.seed, idx);
      PlantedProduct prod;
      int m = 2 + int(idx % 5);
      for (int k = 0; k < m; ++k) {
        double mod = rng.uniform(0.35, 0.96);
        double ang = rng.uniform() < 0.5 ? 0.3 * rng.normal()
                                         : rng.uniform(0.0, 6.283185307179586477);
        prod.zeros.push_back({mod * std::polar(1.0, ang), 1});
      }
      ClassParams params;
      params.alpha = 1.0;
      params.beta = {2.0};
      params.xi = {Complex(1.0, 0.0)};
      params.gamma = 1.0;
      params.tau = tau;
      params.eps = eps;
      AnalyticHandle h = prod.handle();
      ClassKResult ck = empirical_class_K(h, params.alpha, params.beta, params.gamma,
                                          params.xi, 48, 192);
      SpectrumList zeros;
      zeros.items = prod.zeros;
      double lhs = bgk_sum(zeros, params);
      RatioRow r = base_row(theorem_id, idx, m, p, tau);
      fill_ratio(r, lhs, ck.K);
      rows[size_t(i)] = r;
    });
  } else if (theorem_id == "thm6.4") {
    run_parallel(count, jobs, [&](int i) {
      auto idx = std::uint64_t(i);
      Rng rng(ensemble.seed, idx);
      int n = instance_dim(ensemble, idx);
      ComplexMatrix H0 = random_psd_diag(rng, n, 4.0);
      ComplexMatrix H = H0 + ensemble.magnitude * random_matrix(rng, n, 1.0);
      Eigen::SelfAdjointEigenSolver<ComplexMatrix> re(0.5 * (H + H.adjoint()));
      double omega = std::min(re.eigenvalues()(0), -1e-3);

      const double alpha = p, beta = p;
      ComplexMatrix id = ComplexMatrix::Identity(n, n);
      double C0 = 0.0;
      const double grid[] = {1.05, 1.1, 1.2, 1.5, 2, 3, 5, 8, 12, 20,
                             50, 100, 1e3, 1e4, 1e5};
      for (double factor : grid) {
        double a = omega * factor;
        ComplexMatrix diff = (a * id - H).partialPivLu().solve(id) -
                             (a * id - H0).partialPivLu().solve(id);
        double val = std::pow(schatten_norm(diff, p), p) *
                     std::pow(std::abs(a), alpha) *
                     std::pow(std::abs(a) - std::abs(omega), beta);
        C0 = std::max(C0, val);
      }
      SpectrumList spec = eigen_spectrum(H, default_cluster_tol(H));
      double lhs = moment_sum(
          spec, MomentWeightSpec::halfline_num2(p, alpha, beta, omega, 0.0, tau));
      double rhs_core = C0 / std::pow(std::abs(omega), tau);
      RatioRow r = base_row(theorem_id, idx, n, p, tau);
      fill_ratio(r, lhs, rhs_core);
      rows[size_t(i)] = r;
    });
  } else if (theorem_id == "kato-numrange") {
    run_parallel(count, jobs, [&](int i) {
      auto idx = std::uint64_t(i);
      Rng rng(ensemble.seed, idx);
      int n = instance_dim(ensemble, idx);
      ComplexMatrix Z0 = random_matrix(rng, n, 2.0);
      ComplexMatrix M = ensemble.magnitude * random_matrix(rng, n, 1.0);
      BoundReport rep = kato_numrange_check(Z0 + M, Z0, p);
      RatioRow r = base_row(theorem_id, idx, n, p, tau);
      fill_explicit(r, rep.lhs, rep.rhs_core, 1.0, 1e-8);
      rows[size_t(i)] = r;
    });
  } else if (theorem_id == "det-growth") {
    run_parallel(count, jobs, [&](int i) {
      auto idx = std::uint64_t(i);
      Rng rng(ensemble.seed, idx);
      int n = instance_dim(ensemble, idx);
      ComplexMatrix K = ensemble.magnitude * random_matrix(rng, n, 1.0);
      BoundReport rep = det_growth_check(K, p);
      RatioRow r = base_row(theorem_id, idx, n, p, tau);
      fill_explicit(r, rep.lhs, rep.rhs_core, 1.0, 1e-9);
      rows[size_t(i)] = r;
    });
  } else {
    throw ParameterError("unknown theorem id: " + theorem_id);
  }
  return rows;
}

std::string ratio_rows_to_csv(const std::vector<RatioRow>& rows) {
  std::string out =
      "theorem_id,seed,n,p,tau,lhs,rhs_core,explicit_constant,ratio,pass\n";
  for (const auto& r : rows) {
    out += r.theorem_id + "," + std::to_string(r.seed_index) + "," +
           std::to_string(r.n) + "," + fmt(r.p) + "," + fmt(r.tau) + "," +
           fmt(r.lhs) + "," + fmt(r.rhs_core) + ",";
    if (r.explicit_constant) out += fmt(*r.explicit_constant);
    out += "," + fmt(r.ratio) + "," + r.verdict + "\n";
  }
  return out;
}

double max_ratio(const std::vector<RatioRow>& rows) {
  double m = 0.0;
  for (const auto& r : rows) m = std::max(m, r.ratio);
  return m;
}

std::string comparison_report(int count, std::uint64_t seed, double p, double tau) {
  std::string csv =
      "instance,regime,p,tau,sum_interval_weighted,sum_distance,sum_refined,"
      "dominant\n";
  const double a = -2.0, b = 2.0;
  for (int i = 0; i < count; ++i) {
    Rng rng(seed, std::uint64_t(i));
    bool interior = i % 2 == 0;
    double t = rng.uniform(0.3, 1.0);
    double rho = 0.75;
    SpectrumList seq;
    if (interior) {
      double x_star = rng.uniform(-1.5, 1.5);
      double step = 1.0;
      for (int k = 0; k < 40; ++k) {
        step *= rho;
        seq.items.push_back({Complex(x_star, t * step), 1});
      }
    } else {
      double step = 1.0;
      for (int k = 0; k < 40; ++k) {
        step *= rho;
        seq.items.push_back({Complex(a - t * step, 0.0), 1});
      }
    }

    MomentWeightSpec cor =
        p >= 1.0 - tau
            ? MomentWeightSpec::interval_direct(p + 1.0 + tau, pos(p - 1.0 + tau), a, b)
            : MomentWeightSpec::interval_direct(p + 1.0 + tau, 0.0, a, b);
    double kato_expo = std::max(p, 1.0); // numerical-range route needs p >= 1
    MomentWeightSpec dist_w = MomentWeightSpec::interval_direct(kato_expo, kato_expo, a, b);
    MomentWeightSpec refined =
        p > 1.0 ? MomentWeightSpec::interval_direct(p + tau, p - 1.0 + tau, a, b)
                : MomentWeightSpec::interval_direct(1.0 + tau, 0.5 * tau, a, b);

    double s_cor = moment_sum(seq, cor);
    double s_dist = moment_sum(seq, dist_w);
    double s_ref = moment_sum(seq, refined);
    const char* dominant = s_dist >= s_cor && s_dist >= s_ref
                               ? "distance"
                               : (s_ref >= s_cor ? "refined" : "interval-weighted");
    csv += std::to_string(i) + "," + (interior ? "interior" : "endpoint") + "," +
           fmt(p) + "," + fmt(tau) + "," + fmt(s_cor) + "," + fmt(s_dist) + "," +
           fmt(s_ref) + "," + dominant + "\n";
  }
  return csv;
}

} // namespace speclab

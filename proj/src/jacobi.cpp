#include "speclab/jacobi.hpp"

#include "speclab/conformal.hpp"
#include "speclab/quadrature.hpp"

#include <json.hpp>

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>

namespace speclab {

void JacobiSpec::validate() const {
  size_t n = size_t(window_size());
  if (a.size() != n || b.size() != n || c.size() != n)
    throw ParameterError("sequence lengths must match the window");
  for (size_t i = 0; i < n; ++i)
    if (!std::isfinite(a[i].real()) || !std::isfinite(a[i].imag()) ||
        !std::isfinite(b[i].real()) || !std::isfinite(b[i].imag()) ||
        !std::isfinite(c[i].real()) || !std::isfinite(c[i].imag()))
      throw ParameterError("non-finite entry in Jacobi spec");
}

JacobiSpec JacobiSpec::conjugated() const {
  JacobiSpec s = *this;
  for (auto& z : s.a) z = std::conj(z);
  for (auto& z : s.b) z = std::conj(z);
  for (auto& z : s.c) z = std::conj(z);
  return s;
}

bool JacobiSpec::is_free() const {
  for (long k = k_min; k <= k_max; ++k)
    if (std::abs(a_at(k) - 1.0) != 0.0 || std::abs(b_at(k)) != 0.0 ||
        std::abs(c_at(k) - 1.0) != 0.0)
      return false;
  return true;
}

double VSeq::lp_norm(double p) const {
  if (!(p > 0)) throw ParameterError("lp_norm requires p > 0");
  double acc = 0;
  for (double x : v) acc += std::pow(x, p);
  return std::pow(acc, 1.0 / p);
}

double VSeq::linf_norm() const {
  double m = 0;
  for (double x : v) m = std::max(m, x);
  return m;
}

ComplexMatrix build_truncation(const JacobiSpec& spec, long N) {
  spec.validate();
  if (spec.window_size() > 0 && (spec.k_min < -N + 1 || spec.k_max > N - 1))
    throw ParameterError("window exceeds the truncation");
  long dim = 2 * N + 1;
  ComplexMatrix J = ComplexMatrix::Zero(dim, dim);
  for (long k = -N; k <= N; ++k) {
    long row = k + N;
    if (k - 1 >= -N) J(row, row - 1) = spec.a_at(k - 1);
    J(row, row) = spec.b_at(k);
    if (k + 1 <= N) J(row, row + 1) = spec.c_at(k);
  }
  return J;
}

VSeq v_seq(const JacobiSpec& spec) {
  spec.validate();
  VSeq out;
  if (spec.window_size() == 0) return out;
  out.k_min = spec.k_min - 1;
  out.k_max = spec.k_max + 1;
  for (long k = out.k_min; k <= out.k_max; ++k)
    out.v.push_back(std::max({std::abs(spec.a_at(k - 1) - 1.0),
                              std::abs(spec.a_at(k) - 1.0), std::abs(spec.b_at(k)),
                              std::abs(spec.c_at(k - 1) - 1.0),
                              std::abs(spec.c_at(k) - 1.0)}));
  return out;
}

JacobiFactorization factorize(const JacobiSpec& spec) {
  VSeq v = v_seq(spec);
  JacobiFactorization f;
  f.k_min = v.k_min;
  f.k_max = v.k_max;
  f.v_half = v;
  for (auto& x : f.v_half.v) x = std::sqrt(x);
  long m = v.k_max < v.k_min ? 0 : v.k_max - v.k_min + 1;
  f.u = ComplexMatrix::Zero(m, m);
  // 0/0 is taken as 1 on the diagonal (free sites have b = v = 0) and
  // as 0 off the diagonal, so the free spec factors through U = I.
  auto ratio = [](Complex num, double den, Complex at_zero) {
    if (den == 0.0) return std::abs(num) == 0.0 ? at_zero : Complex(0, 0);
    return num / den;
  };
  // Column k of U carries (u_k^-, u_k^0, u_k^+) at rows k-1, k, k+1.
  for (long k = v.k_min; k <= v.k_max; ++k) {
    long i = k - v.k_min;
    f.u(i, i) = ratio(spec.b_at(k), v.at(k), 1.0);
    if (i > 0)
      f.u(i - 1, i) =
          ratio(spec.c_at(k - 1) - 1.0, std::sqrt(v.at(k - 1) * v.at(k)), 0.0);
    if (i + 1 < m)
      f.u(i + 1, i) =
          ratio(spec.a_at(k) - 1.0, std::sqrt(v.at(k + 1) * v.at(k)), 0.0);
  }
  return f;
}

Complex free_jacobi_green(long n, long m, Complex lambda) {
  static const IntervalSpec cut(-2.0, 2.0);
  Complex w = interval_map_inv(lambda, cut);
  Complex denom = 1.0 / w - w;
  return std::pow(w, double(std::labs(n - m))) / denom;
}

FiniteRankPerturbation jacobi_perturbation(const JacobiSpec& spec) {
  spec.validate();
  FiniteRankPerturbation pert;
  if (spec.window_size() == 0) return pert;
  long lo = spec.k_min - 1, hi = spec.k_max + 1;
  for (long k = lo; k <= hi; ++k) pert.support.push_back(k);
  long m = hi - lo + 1;
  pert.block = ComplexMatrix::Zero(m, m);
  for (long k = lo; k <= hi; ++k) {
    long i = k - lo;
    pert.block(i, i) = spec.b_at(k);
    if (i > 0) pert.block(i, i - 1) = spec.a_at(k - 1) - 1.0;
    if (i + 1 < m) pert.block(i, i + 1) = spec.c_at(k) - 1.0;
  }
  return pert;
}

namespace {

// One-time validation of the Green formula against a linear solve on
// a small truncation, run before the first determinant pipeline.
void validate_green_once() {
  static const bool ok = [] {
    const long N = 40;
    ComplexMatrix J = build_truncation(JacobiSpec{}, N);
    long dim = 2 * N + 1;
    for (Complex lam : {Complex(2.7, 0.0), Complex(0.4, 1.1)}) {
      Eigen::VectorXcd rhs = Eigen::VectorXcd::Zero(dim);
      rhs(N) = 1.0;
      Eigen::VectorXcd g =
          (lam * ComplexMatrix::Identity(dim, dim) - J).partialPivLu().solve(rhs);
      for (long k = -N / 2; k <= N / 2; ++k)
        if (std::abs(g(k + N) - free_jacobi_green(k, 0, lam)) > 1e-8)
          throw InconsistencyError("free Green kernel failed its solve check");
    }
    return true;
  }();
  (void)ok;
}

} // namespace

AnalyticHandle jacobi_determinant(const JacobiSpec& spec, double p) {
  validate_green_once();
  FiniteRankPerturbation pert = jacobi_perturbation(spec);
  VSeq v = v_seq(spec);
  double scale = 4.0 + 3.0 * v.linf_norm();
  return perturbation_determinant(
      pert, [](long i, long j, Complex lam) { return free_jacobi_green(i, j, lam); },
      p, ExclusionSet::interval(-2.0, 2.0), scale);
}

namespace {

bool spec_is_hermitian(const JacobiSpec& spec) {
  for (long k = spec.k_min - 1; k <= spec.k_max + 1; ++k) {
    if (std::abs(spec.b_at(k).imag()) != 0.0) return false;
    if (std::abs(spec.a_at(k) - std::conj(spec.c_at(k))) != 0.0) return false;
  }
  return true;
}

Eigen::VectorXcd truncation_values_only(const JacobiSpec& spec, long N) {
  ComplexMatrix J = build_truncation(spec, N);
  Eigen::ComplexEigenSolver<ComplexMatrix> es(J, false);
  if (es.info() != Eigen::Success)
    throw EigensolveError("truncation eigensolve did not converge", {});
  return es.eigenvalues();
}

SpectrumList mass_filtered_spectrum(const JacobiSpec& spec, long N,
                                    double boundary_mass_tol,
                                    double outer_fraction) {
  ComplexMatrix J = build_truncation(spec, N);
  long dim = J.rows();
  Eigen::VectorXcd vals;
  ComplexMatrix vecs;
  if (J.isApprox(J.adjoint(), 1e-14)) {
    // Hermitian fast path; real-symmetric specs hit this.
    if (J.imag().cwiseAbs().maxCoeff() == 0.0) {
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J.real());
      vals = es.eigenvalues().cast<Complex>();
      vecs = es.eigenvectors().cast<Complex>();
    } else {
      Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(J);
      vals = es.eigenvalues().cast<Complex>();
      vecs = es.eigenvectors();
    }
  } else {
    Eigen::ComplexEigenSolver<ComplexMatrix> es(J, true);
    if (es.info() != Eigen::Success)
      throw EigensolveError("truncation eigensolve did not converge", {});
    vals = es.eigenvalues();
    vecs = es.eigenvectors();
  }

  long outer = std::max<long>(1, long(outer_fraction * double(dim) / 2.0));
  SpectrumList out;
  for (long i = 0; i < dim; ++i) {
    Eigen::VectorXcd psi = vecs.col(i);
    double total = psi.squaredNorm();
    double edge = psi.head(outer).squaredNorm() + psi.tail(outer).squaredNorm();
    if (edge > boundary_mass_tol * total) continue; // spurious window state
    out.items.push_back({vals(i), 1});
  }
  // Cluster close survivors (multiple eigenvalues split by truncation).
  SpectrumList clustered;
  clustered.cluster_tol = 1e-8;
  for (const auto& it : out.items) {
    bool merged = false;
    for (auto& c : clustered.items)
      if (std::abs(c.value - it.value) < 1e-8) {
        c.value = (c.value * double(c.multiplicity) + it.value) /
                  double(c.multiplicity + 1);
        c.multiplicity++;
        merged = true;
        break;
      }
    if (!merged) clustered.items.push_back(it);
  }
  clustered.sort_by_position();
  return clustered;
}

} // namespace

SpectrumList truncation_spectrum(const JacobiSpec& spec, long N,
                                 double boundary_mass_tol, double outer_fraction) {
  SpectrumList first =
      mass_filtered_spectrum(spec, N, boundary_mass_tol, outer_fraction);
  // In the Hermitian case small boundary mass pins the eigenvalue to
  // the true spectrum, and the single run is sound.  Non-normal
  // truncations also produce pseudospectral states with small boundary
  // mass far from the limit spectrum; those drift with N, so keep only
  // eigenvalues that persist between two truncation sizes.
  if (spec_is_hermitian(spec)) return first;
  long N2 = N + std::max<long>(20, N / 2);
  Eigen::VectorXcd second = truncation_values_only(spec, N2);
  SpectrumList persistent;
  persistent.cluster_tol = first.cluster_tol;
  for (const auto& it : first.items) {
    for (long j = 0; j < second.size(); ++j)
      if (std::abs(it.value - second(j)) <= 1e-5 * (1.0 + std::abs(it.value))) {
        persistent.items.push_back(it);
        break;
      }
  }
  return persistent;
}

namespace {

long default_half_width(const JacobiSpec& spec) {
  long w = std::max<long>(1, spec.window_size());
  return std::max<long>(80, 4 * w + 60);
}

Box default_search_box(const JacobiSpec& spec) {
  VSeq v = v_seq(spec);
  double radius = 3.0 * v.linf_norm() + 1.0;
  return Box{-2.0 - radius, 2.0 + radius, -radius, radius};
}

} // namespace

JacobiPipelineResult jacobi_spectrum_pipeline(const JacobiSpec& spec, double p,
                                              const JacobiSpectrumOptions& opts) {
  spec.validate();
  JacobiPipelineResult out;
  out.determinant_zeros.cluster_tol = 1e-9;
  if (spec.window_size() == 0 || spec.is_free()) return out;

  // All regularization orders share the zero set (they differ by a
  // nonvanishing analytic factor exp(sum tr(K^j)/j)), and the plain
  // determinant stays in floating-point range near the cut corners
  // where higher orders overflow.  Zero finding therefore always runs
  // on the first-order determinant, whatever p was requested.
  (void)p;
  AnalyticHandle d = jacobi_determinant(spec, 1.0);
  Box box = opts.search_box.width() > 0 ? opts.search_box : default_search_box(spec);
  FindZerosOptions fz;
  fz.guard = opts.guard;
  out.determinant_zeros = find_zeros(d, box, ExclusionSet::interval(-2.0, 2.0), fz);

  if (!opts.cross_check) return out;
  long N = opts.truncation_half_width > 0 ? opts.truncation_half_width
                                          : default_half_width(spec);
  out.truncation = truncation_spectrum(spec, N, opts.boundary_mass_tol,
                                       opts.outer_fraction);
  static const IntervalSpec cut(-2.0, 2.0);

  // A silent winding slip near the cut loses a zero without raising an
  // error; when the truncation disagrees, re-search with denser base
  // sampling before reporting the mismatch.
  for (int attempt = 0; attempt < 2; ++attempt) {
    bool all_matched = true;
    for (const auto& t : out.truncation.items) {
      if (dist_interval(t.value, cut) <= 10.0 * opts.guard || !box.contains(t.value))
        continue;
      bool matched = false;
      for (const auto& z : out.determinant_zeros.items)
        if (std::abs(z.value - t.value) <=
            opts.consistency_tol * (1.0 + std::abs(t.value)))
          matched = true;
      all_matched = all_matched && matched;
    }
    if (all_matched) break;
    fz.initial_samples = 64 * (attempt + 2);
    fz.guard = opts.guard * (attempt == 0 ? 1.0 : 8.0);
    out.determinant_zeros = find_zeros(d, box, ExclusionSet::interval(-2.0, 2.0), fz);
  }
  const SpectrumList& zeros = out.determinant_zeros;

  // Truncation eigenvalues inside the guard band mimic the essential
  // spectrum and have no determinant counterpart.
  auto relevant = [&](Complex mu) {
    return dist_interval(mu, cut) > 10.0 * opts.guard && box.contains(mu);
  };

  std::string trouble;
  for (const auto& t : out.truncation.items) {
    if (!relevant(t.value)) continue;
    bool matched = false;
    for (const auto& z : zeros.items)
      if (std::abs(z.value - t.value) <=
          opts.consistency_tol * (1.0 + std::abs(t.value))) {
        matched = true;
        break;
      }
    if (!matched)
      trouble += "truncation eigenvalue without determinant zero at (" +
                 std::to_string(t.value.real()) + "," +
                 std::to_string(t.value.imag()) + "); ";
  }
  for (const auto& z : zeros.items) {
    // Skip zeros whose eigenvector decay is too slow for this
    // truncation to resolve.
    Complex w = interval_map_inv(z.value, cut);
    double resolvable = std::pow(std::abs(w), 1.8 * double(N) *
                                                  (1.0 - opts.outer_fraction));
    if (resolvable > 1e-6) continue;
    int found = 0;
    for (const auto& t : out.truncation.items)
      if (std::abs(z.value - t.value) <=
          opts.consistency_tol * (1.0 + std::abs(z.value)))
        found += t.multiplicity;
    if (found != z.multiplicity)
      trouble += "determinant zero at (" + std::to_string(z.value.real()) + "," +
                 std::to_string(z.value.imag()) + ") has truncation count " +
                 std::to_string(found) + " vs multiplicity " +
                 std::to_string(z.multiplicity) + "; ";
  }
  out.consistent = trouble.empty();
  out.report = trouble;
  return out;
}

SpectrumList jacobi_discrete_spectrum(const JacobiSpec& spec, double p,
                                      const JacobiSpectrumOptions& opts) {
  JacobiPipelineResult res = jacobi_spectrum_pipeline(spec, p, opts);
  if (!res.consistent)
    throw InconsistencyError("determinant/truncation mismatch: " + res.report);
  return res.determinant_zeros;
}

double jacobi_symbol_norm(Complex lambda, double p) {
  if (!(p >= 1)) throw ParameterError("jacobi_symbol_norm requires p >= 1");
  static const IntervalSpec cut(-2.0, 2.0);
  if (dist_interval(lambda, cut) < 1e-12)
    throw DomainError("lambda lies on [-2,2]");
  QuadratureOptions opts;
  opts.abs_tol = 1e-12;
  // Integrand is symmetric about theta = pi.
  auto res = integrate(
      [&](double theta) {
        return std::pow(std::abs(lambda - 2.0 * std::cos(theta)), -p);
      },
      0.0, 3.14159265358979323846, opts);
  if (!res.converged) throw ContourError("symbol quadrature did not converge");
  return std::pow(2.0 * res.value, 1.0 / p);
}

double laplacian_symbol_norm(Complex lambda, double p, int d) {
  if (d < 1 || d > 3) throw ParameterError("d must be 1, 2 or 3");
  bool admissible = p > std::max(0.5 * d, 1.0) || (p == 1.0 && d == 1);
  if (!admissible)
    throw ParameterError("divergent parameter combination for the symbol norm");
  if (dist_halfline(lambda) < 1e-12 * (1.0 + std::abs(lambda)))
    throw DomainError("lambda lies on [0,inf)");
  const double omega = d == 1 ? 2.0 : (d == 2 ? 6.283185307179586477 : 12.566370614359172954);

  auto f = [&](double r) {
    return std::pow(r, double(d - 1)) * std::pow(std::abs(lambda - r * r), -p);
  };
  double T = 10.0 * (1.0 + std::sqrt(std::abs(lambda)));
  double value = 0.0, tail = 0.0;
  for (int rounds = 0; rounds < 40; ++rounds) {
    QuadratureOptions opts;
    opts.abs_tol = 1e-13;
    opts.split_points = {std::sqrt(std::abs(lambda))};
    value = integrate(f, 0.0, T, opts).value;
    tail = std::pow(T, double(d) - 2.0 * p) / (2.0 * p - d); // algebraic tail
    if (tail < 1e-12 * (value + tail) || tail < 1e-250) break;
    T *= 2.0;
  }
  return std::pow(omega * (value + tail), 1.0 / p);
}

BoundReport schatten_equiv_check(const JacobiSpec& spec, double p) {
  if (!(p > 0)) throw ParameterError("p must be positive");
  VSeq v = v_seq(spec);
  long N = std::max<long>(2, std::max(std::labs(spec.k_min), std::labs(spec.k_max)) + 2);
  ComplexMatrix D = build_truncation(spec, N) -
                    build_truncation(JacobiSpec{}, N);
  double ds = schatten_norm(D, p);
  double vp = v.lp_norm(p);
  bool upper_ok = ds <= 3.0 * vp * (1.0 + 1e-12) + 1e-300;
  bool lower_ok = p < 1.0 || std::pow(6.0, -1.0 / p) * vp <= ds * (1.0 + 1e-12) + 1e-300;
  BoundReport r;
  r.theorem_id = "jacobi-schatten-equivalence";
  r.params = "p=" + std::to_string(p);
  r.lhs = ds;
  r.rhs_core = vp;
  r.explicit_constant = 3.0;
  r.ratio = vp > 0 ? ds / vp : 0.0;
  r.verdict = (upper_ok && lower_ok) ? BoundReport::Verdict::pass
                                     : BoundReport::Verdict::fail;
  r.note = lower_ok ? "lower bound 6^{-1/p}||v||_p holds" : "lower bound violated";
  return r;
}

std::string jacobi_to_json(const JacobiSpec& spec) {
  spec.validate();
  nlohmann::json j;
  j["k_min"] = spec.k_min;
  j["k_max"] = spec.k_max;
  auto seq = [](const std::vector<Complex>& v) {
    nlohmann::json arr = nlohmann::json::array();
    for (Complex z : v) arr.push_back({z.real(), z.imag()});
    return arr;
  };
  j["a"] = seq(spec.a);
  j["b"] = seq(spec.b);
  j["c"] = seq(spec.c);
  return j.dump(2);
}

JacobiSpec jacobi_from_json(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  JacobiSpec spec;
  spec.k_min = j.at("k_min").get<long>();
  spec.k_max = j.at("k_max").get<long>();
  auto seq = [](const nlohmann::json& arr) {
    std::vector<Complex> v;
    for (const auto& e : arr) v.emplace_back(e.at(0).get<double>(), e.at(1).get<double>());
    return v;
  };
  spec.a = seq(j.at("a"));
  spec.b = seq(j.at("b"));
  spec.c = seq(j.at("c"));
  spec.validate();
  return spec;
}

} // namespace speclab

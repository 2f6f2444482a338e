#pragma once

#include "speclab/jacobi.hpp"
#include "speclab/linalg.hpp"

#include <map>
#include <mutex>

namespace speclab {

/// Weight families for eigenvalue-moment sums.  Derived exponents are
/// stored explicitly; the from_* factories compute them from the
/// underlying hypothesis parameters.
struct MomentWeightSpec {
  enum class Family {
    interval,       // dist(l,[a,b])^e1 / (|b-l||a-l|)^{(e1-e2)/2}
    halfline_thm45, // dist^e1 / (|l|^{(e1-e2)/2} (|l|+|a|)^{e1-e4+(e2+e3)/2} |l-a|^e4)
    halfline_cor3,  // dist^e1 / (|l|^{(e1-e2)/2} (|l|+|w|)^{e0+(e1+e2)/2}), split form if w=0
    halfline_num,   // dist^p / (|l-a|^p (|l|+|a|)^p), a < 0
    halfline_num2,  // dist^p * (|l|+|w|)^{a+b-2p-tau}, split form if w=0
    lt_classical,   // |l|^{p-d/2} over Re(l) < 0
    lt_sector,      // |l|^{p-d/2} over |Im(l)| >= chi Re(l)
    lt_laptev,      // (|Im(l)| / (|l+1|^2+1))^p over Re(l) >= 0
    lt_goal         // dist(l,[0,inf))^p / |l|^{d/2}
  };

  Family family = Family::interval;
  double eta0 = 0, eta1 = 0, eta2 = 0, eta3 = 0, eta4 = 0;
  double a = 0, b = 0;   // interval ends / resolvent point
  double omega = 0, s = 0;
  double p = 0, d = 0, chi = 0, alpha = 0, beta = 0, tau = 0;

  static MomentWeightSpec interval_from_hypothesis(double alpha, double beta,
                                                   double tau, double a, double b);
  static MomentWeightSpec interval_direct(double eta1, double eta2, double a,
                                          double b);
  static MomentWeightSpec halfline_thm45(double alpha, double beta, double p,
                                         double tau, double eps, double a);
  static MomentWeightSpec halfline_cor3(double alpha, double beta, double tau,
                                        double omega, double s);
  static MomentWeightSpec halfline_num(double p, double a);
  static MomentWeightSpec halfline_num2(double p, double alpha, double beta,
                                        double omega, double s, double tau);
  static MomentWeightSpec lt_classical(double p, double d);
  static MomentWeightSpec lt_sector(double p, double d, double chi);
  static MomentWeightSpec lt_laptev(double p, double d);
  static MomentWeightSpec lt_goal(double p, double d);

  double weight(Complex lambda) const;
};

/// Weighted sum over (value, multiplicity) pairs; zero-weight
/// eigenvalues (on the barrier set) contribute 0; an exact hit on a
/// weight singularity raises DomainError naming the term.
double moment_sum(const SpectrumList& spectrum, const MomentWeightSpec& w);

struct KatoOptions {
  int n_angles = 256;
  int max_angles = 1 << 13;
  double rel_tol = 1e-8;
  bool sigma_distance_variant = false; // also report dist to sigma(Z0)
};

/// sum dist(lambda, Num(Z0))^p <= ||Z - Z0||_Sp^p with constant
/// exactly 1 (p >= 1).  The hull distance is refined adaptively: an
/// apparent violation within the inscribed/circumscribed gap doubles
/// the angle count instead of failing.
BoundReport kato_numrange_check(const ComplexMatrix& Z, const ComplexMatrix& Z0,
                                double p, const KatoOptions& opts = {});

/// Kato-style sum with distances to sigma(Z0) instead of the
/// numerical range (the quantity whose ratio to ||Z-Z0||_Sp^p can
/// blow up for non-selfadjoint Z0).
double sigma_distance_moment(const ComplexMatrix& Z, const ComplexMatrix& Z0,
                             double p);

/// Schur-basis argument run directly: orthonormal basis of the Riesz
/// subspace for Lambda triangularizing Z, diagonal recovering Lambda,
/// and sum |<(Z-Z0) e_i, e_i>|^p <= ||Z-Z0||_Sp^p.
BoundReport schur_trace_check(const ComplexMatrix& Z, const ComplexMatrix& Z0,
                              const std::vector<Complex>& lambda_subset, double p);

/// sum_{Re(l)<0} |Re(l)|^p <= || Re(H)_- ||_Sp^p, constant 1.
BoundReport ouhabaz_check(const ComplexMatrix& H, double p);

struct ResolventTransferResult {
  BoundReport full;      // moment sum vs 8^p ||R_H(a) - R_H0(a)||_Sp^p
  long grid_points = 0;  // scalar inequality grid
  long grid_violations = 0;
  double worst_margin = 1.0; // min over grid of lhs/rhs (>= 1 means pass)
};

/// Resolvent-transfer bound for H0 Hermitian PSD and a < 0 in rho(H),
/// plus the pointwise scalar inequality
/// dist((a-l)^{-1}, [1/a, 0]) >= (1/8) dist(l,[0,inf)) / (|l-a|(|l|+|a|))
/// on a lambda grid.
ResolventTransferResult resolvent_transfer_check(const ComplexMatrix& H,
                                                 const ComplexMatrix& H0, double a,
                                                 double p, int grid_side = 100,
                                                 double grid_extent = 20.0);

/// Scalar proof inequality alone, at one lambda.
bool resolvent_transfer_scalar(Complex lambda, double a, double* margin = nullptr);

/// Seeded generator spec for ensemble experiments (JSON-round-trippable).
struct EnsembleSpec {
  std::string kind = "jacobi"; // "jacobi" | "matrix"
  int n = 8;                   // matrix dimension
  int support = 3;             // perturbed sites (jacobi)
  double p = 1.0;
  double magnitude = 1.0;
  int count = 100;
  std::uint64_t seed = 1;
};

std::string ensemble_to_json(const EnsembleSpec& e);
EnsembleSpec ensemble_from_json(const std::string& text);

JacobiSpec random_jacobi_spec(const EnsembleSpec& e, std::uint64_t index);

struct RatioRow {
  std::string theorem_id;
  std::uint64_t seed_index = 0;
  int n = 0;
  double p = 0, tau = 0;
  double lhs = 0, rhs_core = 0;
  std::optional<double> explicit_constant;
  double ratio = 0;
  std::string verdict; // "pass" | "fail" | "ratio-only"
};

/// Reusable per-instance results for sweeps sharing one seed stream
/// (extending an ensemble or re-running with another tau never
/// recomputes a spectrum or hypothesis constant).
struct SweepCache {
  std::map<std::uint64_t, SpectrumList> spectra;
  std::map<std::uint64_t, double> hypothesis_K;
  std::mutex mutex;
};

/// Per-instance LHS/K ratios for one theorem over a seeded ensemble.
/// Explicit-constant theorems get pass/fail rows; unspecified-constant
/// theorems get ratio-only rows.  Supported ids: thm4.2, thm7.2,
/// thm7.3, thm7.4, thm3.4, thm6.4, kato-numrange, det-growth.
std::vector<RatioRow> empirical_inequality_sweep(const std::string& theorem_id,
                                                 const EnsembleSpec& ensemble,
                                                 double tau, double eps,
                                                 int jobs = 1,
                                                 SweepCache* cache = nullptr);

std::string ratio_rows_to_csv(const std::vector<RatioRow>& rows);

double max_ratio(const std::vector<RatioRow>& rows);

/// Planted-sequence comparison of the three interval-regime bounds
/// (interval-weighted sum, plain distance sum, refined Jacobi-style
/// sum) across interior vs endpoint accumulation; deterministic CSV.
std::string comparison_report(int count, std::uint64_t seed, double p, double tau);

} // namespace speclab

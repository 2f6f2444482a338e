#pragma once

#include <Eigen/Dense>
#include <complex>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace speclab {

using Complex = std::complex<double>;

/// Dense square matrix of complex scalars; the universal operator
/// representation in this project.
using ComplexMatrix = Eigen::MatrixXcd;

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct ParameterError : Error {
  using Error::Error;
};
struct DomainError : Error {
  using Error::Error;
};
struct ContourError : Error {
  using Error::Error;
};
struct InconsistencyError : Error {
  using Error::Error;
};

struct SpectrumItem {
  Complex value;
  int multiplicity = 1;
};

/// Eigenvalues clustered at cluster_tol; distinct values differ by
/// more than cluster_tol, multiplicities sum to the source dimension.
struct SpectrumList {
  std::vector<SpectrumItem> items;
  double cluster_tol = 0.0;

  int total_multiplicity() const {
    int m = 0;
    for (const auto& it : items) m += it.multiplicity;
    return m;
  }
  void sort_by_position();
};

/// Eigensolver gave up before the residual target; carries whatever
/// eigenvalue estimates were available at that point.
struct EigensolveError : Error {
  EigensolveError(const std::string& msg, SpectrumList partial_state)
      : Error(msg), partial(std::move(partial_state)) {}
  SpectrumList partial;
};

/// Outcome of one inequality instance.  rhs_core is the right-hand
/// side with any unspecified constant set to 1; pass/fail is defined
/// only when an explicit constant is known, otherwise the report is
/// ratio-only.
struct BoundReport {
  std::string theorem_id;
  std::string params;
  double lhs = 0.0;
  double rhs_core = 0.0;
  std::optional<double> explicit_constant;
  double ratio = 0.0;
  enum class Verdict { pass, fail, ratio_only } verdict = Verdict::ratio_only;
  std::string note;

  bool passed() const { return verdict != Verdict::fail; }
};

BoundReport make_explicit_report(std::string theorem_id, std::string params,
                                 double lhs, double rhs_core,
                                 double explicit_constant, double rel_tol,
                                 std::string note = "");
BoundReport make_ratio_report(std::string theorem_id, std::string params,
                              double lhs, double rhs_core,
                              std::string note = "");

} // namespace speclab

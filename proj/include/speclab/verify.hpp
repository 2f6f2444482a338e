#pragma once

#include "speclab/types.hpp"

#include <cstdint>

namespace speclab {

struct VerifyCheck {
  std::string group;
  std::string name;
  double worst = 0.0; // worst residual or margin seen
  double tolerance = 0.0;
  bool pass = false;
};

struct VerifyOptions {
  double tolerance = 0.0; // 0 = per-group defaults
  std::string only;       // empty = all groups
  std::uint64_t seed = 7;
};

/// Exact-identity suite: Jensen balances, conformal identities and
/// distortion constants, Koebe constants, free-operator Green
/// residuals, and the tridiagonal factorization contract.  Groups:
/// jensen, conformal, koebe, green, factorization.
std::vector<VerifyCheck> run_verify_suite(const VerifyOptions& opts = {});

} // namespace speclab

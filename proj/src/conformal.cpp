#include "speclab/conformal.hpp"

#include <cmath>

namespace speclab {

namespace {
constexpr double kSqrt2 = 1.4142135623730950488;
}

Complex interval_map(Complex w, const IntervalSpec& iv) {
  double mod = std::abs(w);
  // Boundary points map onto the cut itself (w = -1 -> a, w = 1 -> b).
  if (mod > 1.0 + 1e-15) throw DomainError("interval_map requires |w| <= 1");
  if (mod < 1e-8) throw DomainError("interval_map pole: w too close to 0");
  return 0.25 * iv.length() * (w + 1.0 / w + 2.0) + iv.a;
}

Complex interval_map_deriv(Complex w, const IntervalSpec& iv) {
  double mod = std::abs(w);
  if (mod >= 1.0 || mod < 1e-8) throw DomainError("w outside the punctured disk");
  return 0.25 * iv.length() * (1.0 - 1.0 / (w * w));
}

Complex interval_map_inv(Complex lambda, const IntervalSpec& iv) {
  if (dist_interval(lambda, iv) < 1e-12 * iv.length())
    throw DomainError("lambda lies on the branch cut [a,b]");
  Complex t = 4.0 * (lambda - iv.a) / iv.length() - 2.0; // w + 1/w
  Complex s = std::sqrt(t * t - 4.0);
  // Larger root first to avoid cancellation; the two roots multiply to 1.
  Complex big = std::abs(t + s) >= std::abs(t - s) ? 0.5 * (t + s) : 0.5 * (t - s);
  Complex w = 1.0 / big;
  if (std::abs(w) >= 1.0) {
    // Off the cut exactly one root is inside; ties cannot occur.
    w = big;
    if (std::abs(w) >= 1.0)
      throw DomainError("no root inside the unit disk (lambda on the cut?)");
  }
  return w;
}

Complex halfline_map(Complex w, double a) {
  if (!(a < 0)) throw ParameterError("halfline_map requires a < 0");
  if (std::abs(w) > 1.0 + 1e-15) throw DomainError("halfline_map requires |w| <= 1");
  if (std::abs(w - 1.0) < 1e-14) throw DomainError("halfline_map maps w = 1 to infinity");
  Complex q = (1.0 + w) / (1.0 - w);
  return a * q * q;
}

Complex halfline_map_deriv(Complex w, double a) {
  if (!(a < 0)) throw ParameterError("halfline_map requires a < 0");
  if (std::abs(w) >= 1.0) throw DomainError("halfline_map requires |w| < 1");
  Complex d = 1.0 - w;
  return 4.0 * a * (1.0 + w) / (d * d * d);
}

Complex halfline_map_inv(Complex lambda, double a) {
  if (!(a < 0)) throw ParameterError("halfline_map requires a < 0");
  if (dist_halfline(lambda) < 1e-12 * (1.0 + std::abs(lambda)))
    throw DomainError("lambda lies on the branch cut [0,inf)");
  Complex root = std::sqrt(-lambda);
  if (root.real() <= 0)
    throw DomainError("principal square root lost positivity (lambda on the cut?)");
  double b = std::sqrt(-a);
  return (root - b) / (root + b);
}

double dist_interval(Complex lambda, const IntervalSpec& iv) {
  if (lambda.real() < iv.a) return std::abs(lambda - Complex(iv.a, 0));
  if (lambda.real() > iv.b) return std::abs(lambda - Complex(iv.b, 0));
  return std::abs(lambda.imag());
}

double dist_halfline(Complex lambda) {
  if (lambda.real() < 0) return std::abs(lambda);
  return std::abs(lambda.imag());
}

BoundReport interval_distortion_check(Complex w, const IntervalSpec& iv,
                                      double rel_tol) {
  double mod = std::abs(w);
  if (!(mod > 0 && mod < 1)) throw DomainError("w must lie in the punctured disk");
  double shape = std::abs(w * w - 1.0) * (1.0 - mod) / mod;
  double lower = iv.length() / 8.0 * shape;
  double upper = iv.length() * (1.0 + kSqrt2) / 8.0 * shape;
  double d = dist_interval(interval_map(w, iv), iv);
  bool ok = lower <= d * (1.0 + rel_tol) && d <= upper * (1.0 + rel_tol);
  BoundReport r;
  r.theorem_id = "interval-distortion";
  r.params = "w=(" + std::to_string(w.real()) + "," + std::to_string(w.imag()) + ")";
  r.lhs = lower;
  r.rhs_core = upper;
  r.explicit_constant = 1.0;
  r.ratio = upper > 0 ? d / upper : 0.0;
  r.verdict = ok ? BoundReport::Verdict::pass : BoundReport::Verdict::fail;
  r.note = "dist=" + std::to_string(d);
  return r;
}

BoundReport koebe_check(MapKind kind, Complex w, double param_a, double param_b,
                        double rel_tol) {
  double mod = std::abs(w);
  double deriv_scale, boundary_dist;
  if (kind == MapKind::interval) {
    IntervalSpec iv(param_a, param_b);
    if (mod < 0.5)
      throw DomainError("interval-map Koebe bound requires |w| >= 1/2");
    deriv_scale = std::abs(interval_map_deriv(w, iv)) * (1.0 - mod);
    boundary_dist = dist_interval(interval_map(w, iv), iv);
  } else {
    deriv_scale = std::abs(halfline_map_deriv(w, param_a)) * (1.0 - mod);
    boundary_dist = dist_halfline(halfline_map(w, param_a));
  }
  double lower = 0.25 * deriv_scale;
  double upper = 2.0 * deriv_scale;
  bool ok = lower <= boundary_dist * (1.0 + rel_tol) &&
            boundary_dist <= upper * (1.0 + rel_tol);
  BoundReport r;
  r.theorem_id = kind == MapKind::interval ? "koebe-interval" : "koebe-halfline";
  r.params = "w=(" + std::to_string(w.real()) + "," + std::to_string(w.imag()) + ")";
  r.lhs = lower;
  r.rhs_core = upper;
  r.explicit_constant = 1.0;
  r.ratio = upper > 0 ? boundary_dist / upper : 0.0;
  r.verdict = ok ? BoundReport::Verdict::pass : BoundReport::Verdict::fail;
  return r;
}

std::vector<IdentityCheck> conformal_identities_check(Complex w,
                                                      const IntervalSpec& iv,
                                                      double halfline_a,
                                                      double tol) {
  std::vector<IdentityCheck> out;
  // Near w = -1/+1 both sides of the endpoint identities are tiny
  // differences of O(|a|+|b|) quantities, so double precision only
  // guarantees absolute agreement at machine-epsilon scale; the
  // absolute floor keeps the check meaningful there.
  const double abs_floor = 1e-13 * (std::abs(iv.a) + std::abs(iv.b) + 1.0);
  auto push = [&out, tol, abs_floor](std::string name, double lhs, double rhs) {
    IdentityCheck c;
    c.name = std::move(name);
    c.lhs = lhs;
    c.rhs = rhs;
    double scale = std::max({std::abs(lhs), std::abs(rhs), 1e-300});
    c.rel_error = std::abs(lhs - rhs) / scale;
    c.pass = std::abs(lhs - rhs) <= tol * scale + abs_floor;
    out.push_back(c);
  };
  auto push_residual = [&out, tol](std::string name, double residual) {
    IdentityCheck c;
    c.name = std::move(name);
    c.lhs = residual;
    c.rhs = 0.0;
    c.rel_error = residual;
    c.pass = residual <= tol;
    out.push_back(c);
  };

  double mod = std::abs(w);
  if (!(mod > 0 && mod < 1)) throw DomainError("w must lie in the punctured disk");
  Complex lambda = interval_map(w, iv);
  double q = 0.25 * iv.length() / mod;
  push("endpoint-a", std::abs(iv.a - lambda), q * std::norm(w + 1.0));
  push("endpoint-b", std::abs(iv.b - lambda), q * std::norm(w - 1.0));

  Complex winv = interval_map_inv(lambda, iv);
  push_residual("roundtrip-interval",
                std::abs(interval_map(winv, iv) - lambda) / (1.0 + std::abs(lambda)));
  double prod_root = std::sqrt(std::abs(lambda - iv.a) * std::abs(lambda - iv.b));
  push("square-identity", std::abs(winv * winv - 1.0),
       4.0 / iv.length() * std::abs(winv) * prod_root);
  // Inequality with the sharp constant 2/(1+sqrt2).
  double lower = 2.0 / (1.0 + kSqrt2) * dist_interval(lambda, iv) / prod_root;
  {
    IdentityCheck c;
    c.name = "disk-radius-lower";
    c.lhs = lower;
    c.rhs = 1.0 - std::abs(winv);
    c.rel_error = c.rhs > 0 ? std::max(0.0, (c.lhs - c.rhs) / c.rhs) : 0.0;
    c.pass = c.lhs <= c.rhs * (1.0 + tol);
    out.push_back(c);
  }

  Complex mu = halfline_map(w, halfline_a);
  Complex shifted = 4.0 * halfline_a * w / ((1.0 - w) * (1.0 - w));
  push_residual("halfline-shift",
                std::abs(mu - halfline_a - shifted) / (1.0 + std::abs(mu)));
  if (dist_halfline(mu) > 1e-10 * (1.0 + std::abs(mu))) {
    Complex root = std::sqrt(-mu);
    double bprime = std::sqrt(-halfline_a);
    push("sqrt-difference", std::abs(root - bprime),
         std::abs(mu - halfline_a) / std::abs(root + bprime));
    push_residual(
        "roundtrip-halfline",
        std::abs(halfline_map(halfline_map_inv(mu, halfline_a), halfline_a) - mu) /
            (1.0 + std::abs(mu)));
  }
  return out;
}

} // namespace speclab

#include "speclab/linalg.hpp"

#include <json.hpp>

#include "speclab/rng.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>

namespace speclab {

namespace {

void require_square_finite(const ComplexMatrix& A) {
  if (A.rows() != A.cols() || A.rows() == 0)
    throw ParameterError("matrix must be square and non-empty");
  if (!A.allFinite()) throw ParameterError("matrix has non-finite entries");
}

SpectrumList cluster_values(const Eigen::VectorXcd& raw, double tol) {
  const long n = raw.size();
  std::vector<int> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  std::function<int(int)> find = [&](int i) {
    while (parent[i] != i) i = parent[i] = parent[parent[i]];
    return i;
  };
  for (long i = 0; i < n; ++i)
    for (long j = i + 1; j < n; ++j)
      if (std::abs(raw(i) - raw(j)) <= tol) parent[find(int(i))] = find(int(j));

  std::vector<SpectrumItem> items;
  for (long r = 0; r < n; ++r) {
    if (find(int(r)) != r) continue;
    Complex sum = 0;
    int count = 0;
    for (long i = 0; i < n; ++i)
      if (find(int(i)) == r) {
        sum += raw(i);
        count++;
      }
    items.push_back({sum / double(count), count});
  }
  // Chain clustering can leave cluster means closer than tol; merge
  // until the separation invariant holds.
  bool merged = true;
  while (merged) {
    merged = false;
    for (size_t i = 0; i < items.size() && !merged; ++i)
      for (size_t j = i + 1; j < items.size() && !merged; ++j)
        if (std::abs(items[i].value - items[j].value) <= tol) {
          double wi = items[i].multiplicity, wj = items[j].multiplicity;
          items[i].value = (items[i].value * wi + items[j].value * wj) / (wi + wj);
          items[i].multiplicity += items[j].multiplicity;
          items.erase(items.begin() + long(j));
          merged = true;
        }
  }
  SpectrumList out;
  out.items = std::move(items);
  out.cluster_tol = tol;
  out.sort_by_position();
  return out;
}

} // namespace

void SpectrumList::sort_by_position() {
  std::sort(items.begin(), items.end(), [](const SpectrumItem& a, const SpectrumItem& b) {
    if (a.value.real() != b.value.real()) return a.value.real() < b.value.real();
    return a.value.imag() < b.value.imag();
  });
}

double default_cluster_tol(const ComplexMatrix& A) {
  return 1e-7 * std::max(1e-300, operator_norm(A));
}

SpectrumList eigen_spectrum(const ComplexMatrix& A, double cluster_tol) {
  require_square_finite(A);
  if (cluster_tol < 0) throw ParameterError("cluster_tol must be >= 0");
  Eigen::ComplexEigenSolver<ComplexMatrix> es(A, /*computeEigenvectors=*/false);
  if (es.info() != Eigen::Success) {
    SpectrumList partial = cluster_values(es.eigenvalues(), cluster_tol);
    throw EigensolveError("eigenvalue iteration did not converge", partial);
  }
  return cluster_values(es.eigenvalues(), cluster_tol);
}

std::vector<double> singular_values(const ComplexMatrix& A) {
  require_square_finite(A);
  Eigen::BDCSVD<ComplexMatrix> svd(A);
  std::vector<double> s(svd.singularValues().data(),
                        svd.singularValues().data() + svd.singularValues().size());
  return s;
}

double operator_norm(const ComplexMatrix& A) {
  Eigen::BDCSVD<ComplexMatrix> svd(A);
  return svd.singularValues().size() ? svd.singularValues()(0) : 0.0;
}

double schatten_norm(const ComplexMatrix& A, double p) {
  if (!(p > 0)) throw ParameterError("schatten_norm requires p > 0");
  auto s = singular_values(A);
  if (std::isinf(p)) return s.empty() ? 0.0 : s.front();
  double acc = 0;
  for (double v : s) acc += std::pow(v, p);
  return std::pow(acc, 1.0 / p);
}

namespace {

double cross(Complex o, Complex a, Complex b) {
  return (a.real() - o.real()) * (b.imag() - o.imag()) -
         (a.imag() - o.imag()) * (b.real() - o.real());
}

// Andrew monotone chain; returns CCW hull (may degenerate to a point
// or a segment).
std::vector<Complex> convex_hull(std::vector<Complex> pts) {
  std::sort(pts.begin(), pts.end(), [](Complex a, Complex b) {
    if (a.real() != b.real()) return a.real() < b.real();
    return a.imag() < b.imag();
  });
  pts.erase(std::unique(pts.begin(), pts.end(),
                        [](Complex a, Complex b) { return std::abs(a - b) < 1e-14; }),
            pts.end());
  if (pts.size() <= 2) return pts;
  std::vector<Complex> h(2 * pts.size());
  size_t k = 0;
  for (size_t i = 0; i < pts.size(); ++i) {
    while (k >= 2 && cross(h[k - 2], h[k - 1], pts[i]) <= 0) k--;
    h[k++] = pts[i];
  }
  size_t lower = k + 1;
  for (size_t i = pts.size() - 1; i-- > 0;) {
    while (k >= lower && cross(h[k - 2], h[k - 1], pts[i]) <= 0) k--;
    h[k++] = pts[i];
  }
  h.resize(k - 1);
  if (h.size() < 3) { // collinear input reduces to a segment
    auto [mn, mx] = std::minmax_element(pts.begin(), pts.end(), [](Complex a, Complex b) {
      if (a.real() != b.real()) return a.real() < b.real();
      return a.imag() < b.imag();
    });
    return {*mn, *mx};
  }
  return h;
}

double dist_point_segment(Complex p, Complex a, Complex b) {
  Complex ab = b - a;
  double len2 = std::norm(ab);
  if (len2 < 1e-300) return std::abs(p - a);
  double t = std::clamp(((p - a).real() * ab.real() + (p - a).imag() * ab.imag()) / len2,
                        0.0, 1.0);
  return std::abs(p - (a + t * ab));
}

} // namespace

NumRangeHull num_range_hull(const ComplexMatrix& A, int n_angles) {
  require_square_finite(A);
  if (n_angles < 8) throw ParameterError("num_range_hull requires n_angles >= 8");
  const double two_pi = 6.283185307179586477;
  NumRangeHull hull;
  hull.n_angles = n_angles;
  std::vector<Complex> pts;
  pts.reserve(size_t(n_angles));
  for (int k = 0; k < n_angles; ++k) {
    double theta = two_pi * k / n_angles;
    Complex rot = std::polar(1.0, -theta);
    ComplexMatrix Hm = 0.5 * (rot * A + std::conj(rot) * A.adjoint());
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(Hm);
    long top = es.eigenvalues().size() - 1;
    Eigen::VectorXcd f = es.eigenvectors().col(top);
    Complex v = f.dot(A * f); // <Af, f> with Eigen's conjugate-first dot
    pts.push_back(v);
    hull.angles.push_back(theta);
    hull.support.push_back(es.eigenvalues()(top));
  }
  hull.vertices = convex_hull(pts);
  return hull;
}

double dist_to_hull(Complex lambda, const NumRangeHull& hull) {
  const auto& v = hull.vertices;
  if (v.empty()) throw ParameterError("empty hull");
  if (v.size() == 1) return std::abs(lambda - v[0]);
  if (v.size() == 2) return dist_point_segment(lambda, v[0], v[1]);
  bool inside = true;
  for (size_t i = 0; i < v.size(); ++i)
    if (cross(v[i], v[(i + 1) % v.size()], lambda) < 0) {
      inside = false;
      break;
    }
  if (inside) return 0.0;
  double d = std::numeric_limits<double>::infinity();
  for (size_t i = 0; i < v.size(); ++i)
    d = std::min(d, dist_point_segment(lambda, v[i], v[(i + 1) % v.size()]));
  return d;
}

double dist_to_numrange_lower(Complex lambda, const NumRangeHull& hull) {
  double best = 0.0;
  for (size_t k = 0; k < hull.angles.size(); ++k) {
    Complex rot = std::polar(1.0, -hull.angles[k]);
    best = std::max(best, (rot * lambda).real() - hull.support[k]);
  }
  return best;
}

namespace {

struct ResolventSampler {
  // Hessenberg reduction done once; each contour node then costs one
  // O(n^2) factorization-free Givens sweep per right-hand-side block.
  explicit ResolventSampler(const ComplexMatrix& A) : hd(A) {
    H = hd.matrixH();
    Q = hd.matrixQ();
    n = A.rows();
  }

  // Solve (mu I - A) X = B.
  ComplexMatrix solve(Complex mu, const ComplexMatrix& B) const {
    ComplexMatrix M = -H;
    M.diagonal().array() += mu;
    ComplexMatrix R = Q.adjoint() * B;
    // Givens elimination of the subdiagonal.
    for (long j = 0; j + 1 < n; ++j) {
      Complex a = M(j, j), b = M(j + 1, j);
      double r = std::hypot(std::abs(a), std::abs(b));
      if (r < 1e-300) continue;
      Complex c = a / r, s = b / r;
      for (long k = j; k < n; ++k) {
        Complex t1 = M(j, k), t2 = M(j + 1, k);
        M(j, k) = std::conj(c) * t1 + std::conj(s) * t2;
        M(j + 1, k) = -s * t1 + c * t2;
      }
      for (long k = 0; k < R.cols(); ++k) {
        Complex t1 = R(j, k), t2 = R(j + 1, k);
        R(j, k) = std::conj(c) * t1 + std::conj(s) * t2;
        R(j + 1, k) = -s * t1 + c * t2;
      }
    }
    for (long i = n - 1; i >= 0; --i) {
      for (long k = 0; k < R.cols(); ++k) {
        Complex acc = R(i, k);
        for (long j = i + 1; j < n; ++j) acc -= M(i, j) * R(j, k);
        R(i, k) = acc / M(i, i);
      }
    }
    return Q * R;
  }

  Eigen::HessenbergDecomposition<ComplexMatrix> hd;
  ComplexMatrix H, Q;
  long n = 0;
};

void check_separation(const SpectrumList& spec, Complex center, double radius,
                      int n_nodes, double spacing_factor) {
  double spacing = 6.283185307179586477 * radius / n_nodes;
  for (const auto& it : spec.items) {
    double gap = std::abs(std::abs(it.value - center) - radius);
    if (gap < spacing_factor * spacing)
      throw ContourError("contour passes too close to an eigenvalue");
  }
}

ComplexMatrix contour_sum(const ResolventSampler& rs, Complex center,
                          double radius, int n, const ComplexMatrix& B) {
  ComplexMatrix acc = ComplexMatrix::Zero(B.rows(), B.cols());
  for (int k = 0; k < n; ++k) {
    double theta = 6.283185307179586477 * k / n;
    Complex e = std::polar(1.0, theta);
    acc += e * rs.solve(center + radius * e, B);
  }
  return acc * (radius / n);
}

} // namespace

ComplexMatrix riesz_projection(const ComplexMatrix& A, Complex center,
                               double radius, const RieszOptions& opts) {
  require_square_finite(A);
  if (!(radius > 0)) throw ParameterError("radius must be positive");
  SpectrumList spec = eigen_spectrum(A, default_cluster_tol(A));
  check_separation(spec, center, radius, opts.n_nodes, opts.spacing_factor);

  ResolventSampler rs(A);
  ComplexMatrix id = ComplexMatrix::Identity(A.rows(), A.cols());
  int n = opts.n_nodes;
  ComplexMatrix P = contour_sum(rs, center, radius, n, id);
  if (opts.adapt) {
    while (2 * n <= opts.max_nodes) {
      ComplexMatrix P2 = contour_sum(rs, center, radius, 2 * n, id);
      double change = (P2 - P).norm();
      P = P2;
      n *= 2;
      if (change < 1e-9) return P;
    }
    throw ContourError("contour quadrature did not stabilize below 1e-9");
  }
  return P;
}

int riesz_rank(const ComplexMatrix& A, Complex center, double radius,
               const RieszOptions& opts, const SpectrumList* known_spectrum) {
  require_square_finite(A);
  SpectrumList local;
  const SpectrumList* spec = known_spectrum;
  if (!spec) {
    local = eigen_spectrum(A, default_cluster_tol(A));
    spec = &local;
  }
  check_separation(*spec, center, radius, opts.n_nodes, opts.spacing_factor);

  int expected = 0;
  for (const auto& it : spec->items)
    if (std::abs(it.value - center) < radius) expected += it.multiplicity;

  ResolventSampler rs(A);
  long n = A.rows();
  int k = std::min<long>(n, expected + 4);
  Rng rng(0x5eca7b5eedull);
  ComplexMatrix V(n, k);
  for (long i = 0; i < n; ++i)
    for (int j = 0; j < k; ++j) V(i, j) = rng.complex_normal();
  Eigen::HouseholderQR<ComplexMatrix> qr(V);
  V = qr.householderQ() * ComplexMatrix::Identity(n, k);

  ComplexMatrix PV = contour_sum(rs, center, radius, opts.n_nodes, V);
  if (opts.adapt) {
    int nodes = opts.n_nodes;
    while (2 * nodes <= opts.max_nodes) {
      ComplexMatrix PV2 = contour_sum(rs, center, radius, 2 * nodes, V);
      double change = (PV2 - PV).norm();
      PV = PV2;
      nodes *= 2;
      if (change < 1e-9) break;
    }
  }
  // Projection property on the probed subspace.
  ComplexMatrix PPV = contour_sum(rs, center, radius, opts.n_nodes, PV);
  double pnorm = PV.norm();
  if (pnorm > 1e-12 && (PPV - PV).norm() > 1e-7 * std::max(1.0, pnorm))
    throw ContourError("projection property violated on probe block");
  return numerical_rank(PV);
}

int numerical_rank(const ComplexMatrix& A, double rel_tol) {
  Eigen::BDCSVD<ComplexMatrix> svd(A);
  const auto& s = svd.singularValues();
  if (s.size() == 0 || s(0) <= 0) return 0;
  int r = 0;
  for (long i = 0; i < s.size(); ++i)
    if (s(i) > rel_tol * s(0)) r++;
  return r;
}

std::string matrix_to_json(const ComplexMatrix& A) {
  nlohmann::json j;
  j["dim"] = A.rows();
  nlohmann::json re = nlohmann::json::array(), im = nlohmann::json::array();
  for (long i = 0; i < A.rows(); ++i) {
    nlohmann::json rrow = nlohmann::json::array(), irow = nlohmann::json::array();
    for (long k = 0; k < A.cols(); ++k) {
      rrow.push_back(A(i, k).real());
      irow.push_back(A(i, k).imag());
    }
    re.push_back(rrow);
    im.push_back(irow);
  }
  j["re"] = re;
  j["im"] = im;
  return j.dump(2);
}

ComplexMatrix matrix_from_json(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  long n = j.at("dim").get<long>();
  if (n <= 0) throw ParameterError("matrix dim must be positive");
  const auto& re = j.at("re");
  const auto& im = j.at("im");
  if (long(re.size()) != n || long(im.size()) != n)
    throw ParameterError("matrix row count does not match dim");
  ComplexMatrix A(n, n);
  for (long i = 0; i < n; ++i) {
    if (long(re[i].size()) != n || long(im[i].size()) != n)
      throw ParameterError("matrix column count does not match dim");
    for (long k = 0; k < n; ++k)
      A(i, k) = Complex(re[i][k].get<double>(), im[i][k].get<double>());
  }
  if (!A.allFinite()) throw ParameterError("matrix has non-finite entries");
  return A;
}

std::string spectrum_to_json(const SpectrumList& s) {
  nlohmann::json j = nlohmann::json::array();
  for (const auto& it : s.items)
    j.push_back({{"re", it.value.real()},
                 {"im", it.value.imag()},
                 {"multiplicity", it.multiplicity}});
  return j.dump(2);
}

SpectrumList spectrum_from_json(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  SpectrumList s;
  for (const auto& e : j)
    s.items.push_back({Complex(e.at("re").get<double>(), e.at("im").get<double>()),
                       e.at("multiplicity").get<int>()});
  return s;
}

BoundReport make_explicit_report(std::string theorem_id, std::string params,
                                 double lhs, double rhs_core,
                                 double explicit_constant, double rel_tol,
                                 std::string note) {
  BoundReport r;
  r.theorem_id = std::move(theorem_id);
  r.params = std::move(params);
  r.lhs = lhs;
  r.rhs_core = rhs_core;
  r.explicit_constant = explicit_constant;
  double rhs = explicit_constant * rhs_core;
  r.ratio = rhs > 0 ? lhs / rhs : (lhs > 0 ? std::numeric_limits<double>::infinity() : 0.0);
  r.verdict = lhs <= rhs * (1.0 + rel_tol) + 1e-300
                  ? BoundReport::Verdict::pass
                  : BoundReport::Verdict::fail;
  r.note = std::move(note);
  return r;
}

BoundReport make_ratio_report(std::string theorem_id, std::string params,
                              double lhs, double rhs_core, std::string note) {
  BoundReport r;
  r.theorem_id = std::move(theorem_id);
  r.params = std::move(params);
  r.lhs = lhs;
  r.rhs_core = rhs_core;
  r.ratio = rhs_core > 0 ? lhs / rhs_core
                         : (lhs > 0 ? std::numeric_limits<double>::infinity() : 0.0);
  r.verdict = BoundReport::Verdict::ratio_only;
  r.note = std::move(note);
  return r;
}

} // namespace speclab

#include "speclab/determinants.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <limits>

namespace speclab {

Complex regularized_det(const ComplexMatrix& K, int n) {
  if (n < 1) throw ParameterError("regularized_det requires n >= 1");
  if (K.rows() != K.cols()) throw ParameterError("matrix must be square");
  // prod (1-l_k) exp(sum_j l_k^j / j) = det(I-K) exp(sum_j tr(K^j)/j);
  // the trace form avoids an eigensolve.
  ComplexMatrix IK = ComplexMatrix::Identity(K.rows(), K.cols()) - K;
  Complex det = IK.partialPivLu().determinant();
  Complex expo = 0.0;
  ComplexMatrix power = ComplexMatrix::Identity(K.rows(), K.cols());
  for (int j = 1; j < n; ++j) {
    power = power * K;
    expo += power.trace() / double(j);
  }
  return det * std::exp(expo);
}

std::pair<Complex, Complex> det_commutation_check(const ComplexMatrix& K1,
                                                  const ComplexMatrix& K2,
                                                  int n) {
  if (K1.cols() != K2.rows() || K2.cols() != K1.rows())
    throw ParameterError("incompatible dimensions");
  return {regularized_det(K1 * K2, n), regularized_det(K2 * K1, n)};
}

BoundReport det_growth_check(const ComplexMatrix& K, double p,
                             const GammaTable& gamma) {
  if (!(p >= 1)) throw ParameterError("det_growth_check requires p >= 1");
  double gp = gamma.at(p);
  int n = int(std::ceil(p - 1e-12));
  double lhs = std::abs(regularized_det(K, n));
  double rhs = std::exp(gp * std::pow(schatten_norm(K, p), p));
  return make_explicit_report("det-growth",
                              "p=" + std::to_string(p) + ";Gamma=" + std::to_string(gp),
                              lhs, rhs, 1.0, 1e-9);
}

double ExclusionSet::distance(Complex z) const {
  switch (kind) {
    case Kind::none:
      return std::numeric_limits<double>::infinity();
    case Kind::interval: {
      if (z.real() < a) return std::abs(z - Complex(a, 0));
      if (z.real() > b) return std::abs(z - Complex(b, 0));
      return std::abs(z.imag());
    }
    case Kind::halfline: {
      if (z.real() < a) return std::abs(z - Complex(a, 0));
      return std::abs(z.imag());
    }
  }
  return 0.0;
}

AnalyticHandle perturbation_determinant(const FiniteRankPerturbation& pert,
                                        ResolventKernel kernel, double p,
                                        const ExclusionSet& domain,
                                        double scale) {
  if (!(p > 0)) throw ParameterError("p must be positive");
  const long m = long(pert.support.size());
  if (pert.factors) {
    if (pert.factors->first.rows() != m || pert.factors->second.cols() != m)
      throw ParameterError("factor blocks must match the support size");
  } else if (pert.block.rows() != m || pert.block.cols() != m) {
    throw ParameterError("block must be |F| x |F|");
  }
  const int n_reg = int(std::ceil(p - 1e-12));
  auto support = pert.support;
  auto block = pert.block;
  auto factors = pert.factors;
  auto excl = domain;
  double sc = std::max(scale, 1e-12);

  auto eval = [support, block, factors, kernel, n_reg, excl, sc](Complex lambda) {
    if (excl.distance(lambda) < 1e-12 * sc)
      throw DomainError("lambda lies on the unperturbed spectrum");
    const long m = long(support.size());
    if (m == 0) return Complex(1.0);
    ComplexMatrix R(m, m);
    for (long i = 0; i < m; ++i)
      for (long j = 0; j < m; ++j)
        R(i, j) = kernel(support[size_t(i)], support[size_t(j)], lambda);
    ComplexMatrix B = factors ? ComplexMatrix(factors->second * R * factors->first)
                              : ComplexMatrix(block * R);
    return regularized_det(B, n_reg);
  };

  AnalyticHandle h;
  h.evaluate = eval;
  h.domain = excl.kind == ExclusionSet::Kind::halfline
                 ? DomainTag::halfline_complement
                 : DomainTag::interval_complement;
  h.domain_a = excl.a;
  h.domain_b = excl.b;

  // Normalization at infinity.
  Complex far = eval(Complex(0.8e6 * sc, 0.6e6 * sc));
  if (std::abs(far - 1.0) > 1e-4)
    throw InconsistencyError("perturbation determinant does not tend to 1 at infinity");
  return h;
}

int zero_order(const AnalyticHandle& h, Complex center, double radius) {
  int w = winding_on_circle(h, center, radius);
  if (w < 0) throw ContourError("negative winding count for an analytic function");
  return w;
}

namespace {

double box_exclusion_distance(const Box& b, const ExclusionSet& e) {
  if (e.kind == ExclusionSet::Kind::none)
    return std::numeric_limits<double>::infinity();
  // Distance between an axis-aligned box and a horizontal segment
  // [a, b2] x {0} (b2 = +inf for a halfline).
  double seg_lo = e.a;
  double seg_hi = e.kind == ExclusionSet::Kind::interval
                      ? e.b
                      : std::numeric_limits<double>::infinity();
  double dx = 0.0;
  if (b.re_hi < seg_lo) dx = seg_lo - b.re_hi;
  else if (b.re_lo > seg_hi) dx = b.re_lo - seg_hi;
  double dy = 0.0;
  if (b.im_hi < 0) dy = -b.im_hi;
  else if (b.im_lo > 0) dy = b.im_lo;
  return std::hypot(dx, dy);
}

struct ZeroHit {
  Complex where;
  int multiplicity;
};

// Branch-point corners of the exclusion set sitting just off a box
// edge make the integrand's phase spin on a tiny stretch of the
// contour; mark those stretches for geometric presampling.
WindingOptions box_winding_options(const Box& b, const ExclusionSet& e,
                                   double guard, double scale) {
  WindingOptions w;
  if (e.kind == ExclusionSet::Kind::none) return w;
  std::vector<double> xs = {e.a};
  if (e.kind == ExclusionSet::Kind::interval) xs.push_back(e.b);
  const double thresh = 0.02 * scale + 10.0 * guard;
  const double W = b.width(), H = b.height();
  for (double xe : xs) {
    if (xe >= b.re_lo && xe <= b.re_hi) {
      if (std::abs(b.im_lo) <= thresh)
        w.focus_ts.push_back(0.25 * (xe - b.re_lo) / W);
      if (std::abs(b.im_hi) <= thresh)
        w.focus_ts.push_back(0.5 + 0.25 * (b.re_hi - xe) / W);
    }
    if (0.0 >= b.im_lo - thresh && 0.0 <= b.im_hi + thresh) {
      double y = std::clamp(0.0, b.im_lo, b.im_hi);
      if (std::abs(b.re_hi - xe) <= thresh)
        w.focus_ts.push_back(0.25 + 0.25 * (y - b.im_lo) / H);
      if (std::abs(b.re_lo - xe) <= thresh)
        w.focus_ts.push_back(0.75 + 0.25 * (b.im_hi - y) / H);
    }
  }
  w.focus_scale = std::max(1e-13, 0.05 * guard / std::max(W, H));
  return w;
}

struct Finder {
  AnalyticHandle base;
  ExclusionSet exclusion;
  FindZerosOptions opts;
  double scale;
  // Every recorded zero is divided out of the working handle, so all
  // later winding counts see only the zeros not yet found.  That makes
  // split lines near found zeros harmless (phase aliasing across a
  // shared edge silently shifts counts between siblings otherwise) and
  // lets plain Newton peel zeros one at a time.
  std::vector<ZeroHit> hits;
  int split_counter = 0;

  double split_ratio() {
    static const double ratios[3] = {0.5, 0.513, 0.487};
    return ratios[(split_counter++) % 3];
  }

  double cluster_floor() const { return opts.cluster_res * scale; }

  AnalyticHandle deflated() const {
    AnalyticHandle d;
    auto eval = base.evaluate;
    auto deriv = base.derivative;
    auto list = hits;
    d.evaluate = [eval, list](Complex z) {
      Complex v = eval(z);
      for (const auto& hit : list) {
        Complex dz = z - hit.where;
        for (int m = 0; m < hit.multiplicity; ++m) v /= dz;
      }
      return v;
    };
    if (deriv) {
      // (h / prod (z-z_k)^{m_k})' via the logarithmic derivative.
      d.derivative = [eval, deriv, list](Complex z) {
        Complex v = eval(z);
        Complex dv = deriv(z);
        Complex corr = 0.0;
        Complex denom = 1.0;
        for (const auto& hit : list) {
          Complex dz = z - hit.where;
          corr += double(hit.multiplicity) / dz;
          for (int m = 0; m < hit.multiplicity; ++m) denom *= dz;
        }
        return (dv - v * corr) / denom;
      };
    }
    return d;
  }

  int box_winding(const Box& b, const AnalyticHandle& h, int density_mult = 1) {
    WindingOptions w = box_winding_options(b, exclusion, opts.guard, scale);
    w.initial_samples = opts.initial_samples * density_mult;
    // Deflated zeros turn into reciprocal factors whose phase along a
    // nearby edge swings through a compact feature that uniform
    // sampling aliases; focus the sampling at their edge projections.
    double W = b.width(), H = b.height();
    double min_dist = 1e300;
    auto add_focus = [&](double t, double dist) {
      w.focus_ts.push_back(t);
      min_dist = std::min(min_dist, std::max(dist, 1e-9 * scale));
    };
    for (const auto& hit : hits) {
      double x = hit.where.real(), y = hit.where.imag();
      if (x >= b.re_lo && x <= b.re_hi) {
        double db = std::abs(y - b.im_lo), dt = std::abs(y - b.im_hi);
        if (db < W / 4) add_focus(0.25 * (x - b.re_lo) / W, db);
        if (dt < W / 4) add_focus(0.5 + 0.25 * (b.re_hi - x) / W, dt);
      }
      if (y >= b.im_lo && y <= b.im_hi) {
        double dr = std::abs(x - b.re_hi), dl = std::abs(x - b.re_lo);
        if (dr < H / 4) add_focus(0.25 + 0.25 * (y - b.im_lo) / H, dr);
        if (dl < H / 4) add_focus(0.75 + 0.25 * (b.im_hi - y) / H, dl);
      }
    }
    if (min_dist < 1e300)
      w.focus_scale = std::min(w.focus_scale > 0 ? w.focus_scale : 1.0,
                               std::max(1e-13, 0.02 * min_dist / (4.0 * std::max(W, H))));
    return winding_on_box(h, b, w);
  }

  // Multiplicity of the (not yet deflated) zero at z, by the argument
  // principle on a ladder of small circles; 1 when nothing works.
  int order_at(const AnalyticHandle& h, Complex z, int w_max) {
    const double radii[3] = {1e-4, 4e-4, 2e-5};
    for (double rr : radii) {
      double r = std::min(rr * scale, 0.45 * exclusion.distance(z));
      if (r <= 1e-13) continue;
      try {
        int m = winding_on_circle(h, z, r);
        if (m >= 1) return std::min(m, w_max);
      } catch (const Error&) {
      }
    }
    return 1;
  }

  // One plain-Newton descent from the box center on the deflated
  // handle; record + deflate the zero it lands on.  Returns the
  // peeled multiplicity, or 0 if Newton failed.
  int try_newton(const Box& box, int w) {
    AnalyticHandle h = deflated();
    Complex z = box.center();
    Complex best = z;
    double best_mod = std::numeric_limits<double>::infinity();
    try {
      for (int it = 0; it < 160; ++it) {
        Complex v = h(z);
        if (!std::isfinite(std::abs(v))) break;
        if (std::abs(v) < best_mod) {
          best = z;
          best_mod = std::abs(v);
        }
        if (std::abs(v) < opts.newton_tol) break;
        Complex d = h.deriv_or_fd(z, scale);
        if (!std::isfinite(std::abs(d)) || std::abs(d) < 1e-300) break;
        Complex znew = z - v / d;
        if (!box.contains(znew) &&
            std::abs(znew - box.center()) > 2.0 * box.diameter())
          break;
        if (exclusion.distance(znew) < 0.5 * opts.guard) break;
        z = znew;
      }
    } catch (const DomainError&) {
      return 0; // stepped onto the excluded set
    }
    // Strict containment: a zero outside the box belongs to a sibling
    // region and must not consume this box's count (the exclusion slab
    // between regions can be razor thin).
    double margin = 1e-12 * scale;
    Box accept{box.re_lo - margin, box.re_hi + margin, box.im_lo - margin,
               box.im_hi + margin};
    if (best_mod >= opts.newton_tol || !accept.contains(best)) return 0;

    int m = order_at(h, best, w);
    {
      // Refine with the multiplicity-scaled step (quadratic); the
      // residual-stopped position is only good to newton_tol^(1/m),
      // and even simple zeros gain a few digits from the step-size
      // stop.  Exact hits make v and the derivative vanish together
      // (0/0), hence the finiteness guards.
      Complex zr = best, zbest = best;
      double zbest_mod = best_mod;
      try {
        for (int it = 0; it < 60; ++it) {
          Complex v = h(zr);
          double mv = std::abs(v);
          if (!std::isfinite(mv)) break;
          if (mv <= zbest_mod) {
            zbest = zr;
            zbest_mod = mv;
          }
          if (mv == 0.0) break;
          Complex d = h.deriv_or_fd(zr, scale);
          double md = std::abs(d);
          if (!std::isfinite(md) || md < 1e-300) break;
          Complex step = double(m) * v / d;
          if (std::abs(step) < 1e-14 * scale) break;
          zr -= step;
        }
      } catch (const DomainError&) {
      }
      if (std::abs(zbest - best) < 1e-2 * scale) best = zbest;
    }
    hits.push_back({best, m});
    return m;
  }

  // Quadrisect with split-line jitter; child windings must add up.
  void subdivide(const Box& box, int parent_winding) {
    for (int attempt = 0; attempt < opts.max_retries; ++attempt) {
      double rc = box.re_lo + box.width() * split_ratio();
      double ic = box.im_lo + box.height() * split_ratio();
      Box quads[4] = {{box.re_lo, rc, box.im_lo, ic},
                      {rc, box.re_hi, box.im_lo, ic},
                      {box.re_lo, rc, ic, box.im_hi},
                      {rc, box.re_hi, ic, box.im_hi}};
      int w[4];
      int total = 0;
      bool computed = true;
      try {
        AnalyticHandle h = deflated();
        for (int q = 0; q < 4; ++q) {
          w[q] = box_winding(quads[q], h);
          total += w[q];
        }
      } catch (const ContourError&) {
        computed = false; // a split line ran into a zero; jitter, retry
      }
      if (computed && total == parent_winding) {
        for (int q = 0; q < 4; ++q)
          if (w[q] > 0) descend(quads[q], w[q]);
        return;
      }
      if (computed) {
        // Parent and children disagree; arbitrate by recomputing the
        // parent at much higher sampling density (a phase slip at one
        // density almost never reproduces at another).
        try {
          if (box_winding(box, deflated(), 16) == total) {
            for (int q = 0; q < 4; ++q)
              if (w[q] > 0) descend(quads[q], w[q]);
            return;
          }
        } catch (const ContourError&) {
        }
      }
    }
    if (box.diameter() <= 64 * cluster_floor()) {
      hits.push_back({box.center(), parent_winding}); // unresolved cluster
      return;
    }
    throw ContourError("winding subdivision failed in box [" +
                       std::to_string(box.re_lo) + "," + std::to_string(box.re_hi) +
                       "]x[" + std::to_string(box.im_lo) + "," +
                       std::to_string(box.im_hi) + "]");
  }

  // Box holding w not-yet-found zeros of the current deflated handle.
  void descend(const Box& box, int w) {
    while (w > 0) {
      int m = try_newton(box, w);
      if (m > 0) {
        w -= m;
        continue;
      }
      if (box.diameter() > cluster_floor()) {
        subdivide(box, w);
        return;
      }
      hits.push_back({box.center(), w}); // resolution floor
      return;
    }
  }

  // Top-level entry: the winding is not known yet and the box may be
  // wiggled outward if its boundary runs into a zero.
  int search(const Box& box, int) {
    if (box_exclusion_distance(box, exclusion) < opts.guard) {
      // Should not happen: the top-level decomposition keeps boxes
      // clear of the exclusion set.
      throw ContourError("search box touches the exclusion set");
    }
    int w = 0;
    bool ok = false;
    Box b = box;
    for (int attempt = 0; attempt < opts.max_retries && !ok; ++attempt) {
      try {
        // Verify the count at two sampling densities; a disagreement
        // means one of them aliased a near-edge zero away.
        AnalyticHandle h = deflated();
        w = box_winding(b, h);
        int mults[3] = {4, 16, 64};
        for (int k = 0; k < 3; ++k) {
          int w2 = box_winding(b, h, mults[k]);
          if (w2 == w) break;
          w = w2;
          if (k == 2) throw ContourError("winding count unstable across densities");
        }
        ok = true;
      } catch (const ContourError& e) {
        if (attempt + 1 == opts.max_retries)
          throw ContourError(std::string(e.what()) + " in box [" +
                             std::to_string(box.re_lo) + "," +
                             std::to_string(box.re_hi) + "]x[" +
                             std::to_string(box.im_lo) + "," +
                             std::to_string(box.im_hi) + "]");
        // Wiggle outward; zeros sitting on an edge move inside.
        double dr = box.width() * 5e-2 * (attempt + 1);
        double di = box.height() * 5e-2 * (attempt + 1);
        b = Box{box.re_lo - dr, box.re_hi + dr, box.im_lo - di, box.im_hi + di};
        if (box_exclusion_distance(b, exclusion) < opts.guard) b = box;
      }
    }
    if (w == 0) return 0;
    descend(b, w);
    return w;
  }
};

} // namespace

namespace {

// Decompose the search region into boxes clear of the inflated
// exclusion set (a horizontal slab of half-height 2*guard around it,
// so every region box keeps a full guard margin).
std::vector<Box> build_regions(const Box& search, const ExclusionSet& exclusion,
                               double guard) {
  std::vector<Box> regions;
  double g = 2.0 * guard;
  auto add = [&regions](double rl, double rh, double il, double ih) {
    if (rh - rl > 1e-14 && ih - il > 1e-14) regions.push_back({rl, rh, il, ih});
  };
  if (exclusion.kind == ExclusionSet::Kind::none) {
    regions.push_back(search);
    return regions;
  }
  double seg_lo = exclusion.a - g;
  double seg_hi = exclusion.kind == ExclusionSet::Kind::interval
                      ? exclusion.b + g
                      : std::numeric_limits<double>::infinity();
  bool slab_in_band = search.im_lo < g && search.im_hi > -g;
  add(search.re_lo, search.re_hi, std::max(g, search.im_lo), search.im_hi);
  add(search.re_lo, search.re_hi, search.im_lo, std::min(-g, search.im_hi));
  if (slab_in_band) {
    add(search.re_lo, std::min(seg_lo, search.re_hi), std::max(-g, search.im_lo),
        std::min(g, search.im_hi));
    if (std::isfinite(seg_hi))
      add(std::max(seg_hi, search.re_lo), search.re_hi, std::max(-g, search.im_lo),
          std::min(g, search.im_hi));
  }
  return regions;
}

} // namespace

SpectrumList find_zeros(const AnalyticHandle& h, const Box& search,
                        const ExclusionSet& exclusion,
                        const FindZerosOptions& opts) {
  if (!(search.width() > 0) || !(search.height() > 0))
    throw ParameterError("search box must have positive area");
  double scale = std::max(1.0, 0.5 * search.diameter());

  // Zeros sitting against the exclusion set make the slab-adjacent
  // edges untrackable; on failure restart with a wider slab and denser
  // base sampling, giving up the band against the cut.
  FindZerosOptions attempt_opts = opts;
  Finder finder{h, exclusion, attempt_opts, scale, {}, 0};
  for (int attempt = 0;; ++attempt) {
    try {
      finder = Finder{h, exclusion, attempt_opts, scale, {}, 0};
      for (const auto& region : build_regions(search, exclusion, attempt_opts.guard))
        finder.search(region, -1);
      break;
    } catch (const ContourError&) {
      if (attempt >= opts.guard_escalations) throw;
      attempt_opts.guard *= 8.0;
      attempt_opts.initial_samples += 32;
    }
  }

  // Peeled layers of one zero arrive as separate hits; coincident hits
  // therefore add their multiplicities.
  SpectrumList out;
  out.cluster_tol = opts.merge_tol * scale;
  for (const auto& hit : finder.hits) {
    bool merged = false;
    for (auto& item : out.items)
      if (std::abs(item.value - hit.where) <= 10 * opts.merge_tol * scale) {
        item.multiplicity += hit.multiplicity;
        merged = true;
        break;
      }
    if (!merged) out.items.push_back({hit.where, hit.multiplicity});
  }
  out.sort_by_position();
  return out;
}

} // namespace speclab

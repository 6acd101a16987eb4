#include "ads3/width.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

#include "ads3/errors.hpp"
#include "ads3/kernels.hpp"
#include "nelder_mead.hpp"

namespace ads3 {

double chart_separation(const Eigen::Vector3d& a, const Eigen::Vector3d& b) {
  // Gram(P, Q) = Gram(P, Q - P); the difference form keeps short chords accurate.
  const LorentzVec P = chart_lift(a);
  const LorentzVec D = chart_lift(b) - P;
  const double pp = inner(P, P), pd = inner(P, D), dd = inner(D, D);
  const double qq = pp + 2 * pd + dd;
  if (!(pp < 0 && qq < 0)) return 0.0;
  const double gram = pp * dd - pd * pd;
  if (!(gram > 0)) return 0.0;
  return std::atan2(std::sqrt(gram), std::abs(pp + pd));
}

namespace {

// Parameter gap by which the line a + s d misses the hull, from half-space clipping.
double clip_gap(const ConvexHull3& h, const Eigen::Vector3d& a, const Eigen::Vector3d& d) {
  double lo = -std::numeric_limits<double>::infinity(), hi = std::numeric_limits<double>::infinity();
  double parallel = 0;
  for (const auto& f : h.facets) {
    const double nd = f.normal.dot(d), na = f.normal.dot(a) - f.offset;
    if (nd > 0) {
      hi = std::min(hi, -na / nd);
    } else if (nd < 0) {
      lo = std::max(lo, -na / nd);
    } else if (na > 0) {
      parallel = std::max(parallel, na);
    }
  }
  if (parallel > 0) return parallel;
  if (!std::isfinite(lo - hi)) return 1.0;
  return std::max(lo - hi, 1e-300);
}

}  // namespace

Chord hull_chord(const ConvexHull3& h, const Eigen::Vector3d& a, const Eigen::Vector3d& b) {
  // Intersect with the facet triangles rather than clip by facet planes: slivers
  // along planar arcs of the curve have planes that, extended, cut the hull by far
  // more than the construction tolerance.
  Chord c;
  c.lo = c.hi = a;
  if (h.degenerate) return c;
  const Eigen::Vector3d d = b - a;
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  int flo = -1, fhi = -1;
  for (std::size_t k = 0; k < h.facets.size(); ++k) {
    const HullFacet& f = h.facets[k];
    const double nd = f.normal.dot(d);
    if (nd == 0) continue;
    const double s = (f.offset - f.normal.dot(a)) / nd;
    const Eigen::Vector3d x = a + s * d;
    const Eigen::Vector3d &v0 = h.points[f.v[0]], &v1 = h.points[f.v[1]], &v2 = h.points[f.v[2]];
    const double w0 = f.normal.dot((v1 - x).cross(v2 - x));
    const double w1 = f.normal.dot((v2 - x).cross(v0 - x));
    const double w2 = f.normal.dot((v0 - x).cross(v1 - x));
    const double tol = -1e-12 * (std::abs(w0) + std::abs(w1) + std::abs(w2));
    if (w0 < tol || w1 < tol || w2 < tol) continue;
    if (s < lo) lo = s, flo = static_cast<int>(k);
    if (s > hi) hi = s, fhi = static_cast<int>(k);
  }
  if (!(lo < hi)) {
    c.miss = clip_gap(h, a, d);
    return c;
  }
  c.lo = a + lo * d;
  c.hi = a + hi * d;
  c.lo_facet = flo;
  c.hi_facet = fhi;
  if (d.z() < 0) {  // future is increasing z along timelike lines
    std::swap(c.lo, c.hi);
    std::swap(c.lo_facet, c.hi_facet);
  }
  c.length = chart_separation(c.lo, c.hi);
  return c;
}

bool support_plane_disjoint(const Plane& P, const BoundaryCurve& c) {
  int sign = 0;
  for (const auto& x : c.chart_points) {
    const double s = inner(chart_lift(x), P.dual);
    const int sg = s > 0 ? 1 : s < 0 ? -1 : 0;
    if (sg == 0 || (sign != 0 && sg != sign)) return false;
    sign = sg;
  }
  return sign != 0;
}

namespace {

using Vec4 = std::array<double, 4>;

// Lines (a, b, zc) + s (u, v, 1). Timelike lines are never horizontal in the chart,
// so this covers all of them.
struct ChordObjective {
  const ConvexHull3& h;
  double zc;

  Chord chord(const Vec4& x) const {
    const Eigen::Vector3d A(x[0], x[1], zc);
    return hull_chord(h, A, A + Eigen::Vector3d(x[2], x[3], 1.0));
  }
  double operator()(const Vec4& x) const {
    const Chord c = chord(x);
    return c.miss > 0 ? -c.miss : c.length;
  }
  std::optional<Vec4> params(const Eigen::Vector3d& p, const Eigen::Vector3d& q) const {
    const Eigen::Vector3d d = q - p;
    if (!(std::abs(d.z()) > 1e-12 * d.norm())) return std::nullopt;
    const Eigen::Vector3d A = p + ((zc - p.z()) / d.z()) * d;
    return Vec4{A.x(), A.y(), d.x() / d.z(), d.y() / d.z()};
  }
};

using NM4 = detail::NMPoint<4>;

bool better(const NM4& a, const NM4& b) {
  if (a.f != b.f) return a.f > b.f;
  return a.x < b.x;
}

struct ScanSet {
  kernels::SoA4 unit;
  std::vector<Eigen::Vector3d> chart;
  std::vector<int> facet;
};

ScanSet scan_points(const ConvexHull3& h, FacetClass cls, int cap) {
  static constexpr double kBary[4][3] = {
      {1.0 / 3, 1.0 / 3, 1.0 / 3}, {4.0 / 6, 1.0 / 6, 1.0 / 6}, {1.0 / 6, 4.0 / 6, 1.0 / 6}, {1.0 / 6, 1.0 / 6, 4.0 / 6}};
  std::vector<std::pair<Eigen::Vector3d, int>> all;
  for (std::size_t f = 0; f < h.facets.size(); ++f) {
    if (h.facet_class[f] != cls) continue;
    const auto& v = h.facets[f].v;
    for (const auto& w : kBary)
      all.emplace_back(w[0] * h.points[v[0]] + w[1] * h.points[v[1]] + w[2] * h.points[v[2]], static_cast<int>(f));
  }
  const std::size_t stride = std::max<std::size_t>(1, (all.size() + cap - 1) / cap);
  ScanSet s;
  for (std::size_t i = 0; i < all.size(); i += stride) {
    const LorentzVec X = chart_lift(all[i].first);
    const double q = inner(X, X);
    if (!(q < 0)) continue;
    s.unit.push_back(X / std::sqrt(-q));
    s.chart.push_back(all[i].first);
    s.facet.push_back(all[i].second);
  }
  return s;
}

LorentzVec unit_lift(const Eigen::Vector3d& x) {
  const LorentzVec X = chart_lift(x);
  const double q = inner(X, X);
  return q < 0 ? X / std::sqrt(-q) : X;
}

// cos^2 of the separation between P (any scale, timelike) and unit timelike Q;
// above 1 when not timelike separated.
double sep_ratio(const LorentzVec& P, const LorentzVec& Q) {
  const double pp = inner(P, P);
  if (!(pp < 0)) return std::numeric_limits<double>::infinity();
  const double pq = inner(P, Q);
  return -pq * pq / pp;
}

struct Foot {
  Eigen::Vector3d x;
  double ratio = std::numeric_limits<double>::infinity();
  int edge = -1;  // -1: interior of the facet; k: on the edge (v[k], v[k+1])
};

// Point of facet f farthest (in timelike separation) from Q. On the facet plane the
// critical point is the Lorentz-orthogonal foot of Q; on an edge line it is the
// root of a linear equation. Ideal vertices are never optimal (ratio -> infinity).
Foot best_on_facet(const ConvexHull3& h, int fi, const LorentzVec& Q) {
  const HullFacet& f = h.facets[fi];
  const LorentzVec n = facet_dual(f);
  const double nn = inner(n, n);
  if (nn < -1e-14 * (1 + f.offset * f.offset)) {
    const LorentzVec F = Q - n * (inner(Q, n) / nn);
    if (std::abs(F.x3) > 1e-300) {
      const Eigen::Vector3d x(F.x1 / F.x3, F.x2 / F.x3, F.x4 / F.x3);
      const Eigen::Vector3d &a = h.points[f.v[0]], &b = h.points[f.v[1]], &c = h.points[f.v[2]];
      if (f.normal.dot((b - x).cross(c - x)) >= 0 && f.normal.dot((c - x).cross(a - x)) >= 0 &&
          f.normal.dot((a - x).cross(b - x)) >= 0)
        return {x, sep_ratio(chart_lift(x), Q), -1};
    }
  }
  Foot best;
  for (int k = 0; k < 3; ++k) {
    const Eigen::Vector3d &xa = h.points[f.v[k]], &xb = h.points[f.v[(k + 1) % 3]];
    const LorentzVec A = chart_lift(xa), E = chart_lift(xb) - A;
    const double a = inner(A, Q), b = inner(E, Q), c = inner(A, A), d = inner(A, E), e = inner(E, E);
    double s;
    if (b != 0 && -a / b > 0 && -a / b < 1) {
      s = -a / b;  // orthogonal to Q: separation pi/2
    } else {
      const double den = b * d - a * e;
      s = den != 0 ? (a * d - b * c) / den : 0.5;
      s = std::clamp(s, 1e-12, 1 - 1e-12);
    }
    const Eigen::Vector3d x = xa + s * (xb - xa);
    const double r = sep_ratio(chart_lift(x), Q);
    if (r < best.ratio) best = {x, r, k};
  }
  return best;
}

struct Located {
  Eigen::Vector3d x;
  int facet;
};

// Farthest point from Q on the boundary component of class cls, by walking across
// edges from `from` while that improves.
Located best_response(const ConvexHull3& h, FacetClass cls, const Located& from, const LorentzVec& Q) {
  int f = from.facet;
  Foot cur = best_on_facet(h, f, Q);
  for (int step = 0; step < 4 * static_cast<int>(h.facets.size()) && cur.edge >= 0; ++step) {
    const int g = h.facets[f].neighbor[cur.edge];
    if (g < 0 || h.facet_class[g] != cls) break;
    const Foot nb = best_on_facet(h, g, Q);
    if (!(nb.ratio < cur.ratio)) break;
    f = g;
    cur = nb;
  }
  const double r0 = sep_ratio(chart_lift(from.x), Q);
  return cur.ratio < r0 ? Located{cur.x, f} : from;
}

struct Pair {
  Located p, q;
};

// Alternating best responses; the separation is nondecreasing.
Pair alternate(const ConvexHull3& h, Located p, Located q) {
  double prev = chart_separation(p.x, q.x);
  for (int it = 0; it < 200; ++it) {
    p = best_response(h, FacetClass::Past, p, unit_lift(q.x));
    q = best_response(h, FacetClass::Future, q, unit_lift(p.x));
    const double d = chart_separation(p.x, q.x);
    if (!(d > prev + 1e-17)) break;
    prev = d;
  }
  return {p, q};
}

WidthEstimate flat_estimate(const ConvexHull3& h) {
  WidthEstimate e;
  e.degenerate = true;
  Eigen::Vector3d c = Eigen::Vector3d::Zero();
  for (const auto& x : h.points) c += x;
  c /= static_cast<double>(h.points.size());
  e.p_chart = e.q_chart = c;
  e.p = e.q = chart_lift(c);
  e.samples = static_cast<int>(h.points.size());
  return e;
}

WidthEstimate search(const ConvexHull3& h, const WidthConfig& cfg, const std::optional<std::pair<Eigen::Vector3d, Eigen::Vector3d>>& seed) {
  if (h.degenerate) return flat_estimate(h);
  double zc = 0, edge = 0;
  for (const auto& x : h.points) zc += x.z();
  zc /= static_cast<double>(h.points.size());
  for (const auto& f : h.facets) edge += (h.points[f.v[0]] - h.points[f.v[1]]).norm();
  edge /= static_cast<double>(h.facets.size());
  const ChordObjective obj{h, zc};

  // Coarse scan: min |<P, Q>| over unit lifts of interior facet points.
  const ScanSet past = scan_points(h, FacetClass::Past, cfg.scan_points);
  const ScanSet fut = scan_points(h, FacetClass::Future, cfg.scan_points);
  struct Cand {
    double v;
    int i, j;
  };
  std::vector<Cand> cands;
  if (past.unit.size() > 0 && fut.unit.size() > 0) {
    cands.reserve(past.unit.size());
    for (std::size_t i = 0; i < past.unit.size(); ++i) {
      const kernels::ArgMin m = kernels::min_abs_inner(past.unit.at(i), fut.unit);
      cands.push_back({m.value, static_cast<int>(i), static_cast<int>(m.index)});
    }
    std::sort(cands.begin(), cands.end(), [](const Cand& a, const Cand& b) {
      return a.v != b.v ? a.v < b.v : a.i != b.i ? a.i < b.i : a.j < b.j;
    });
  }

  std::vector<Vec4> starts;
  if (seed)
    if (auto x = obj.params(seed->first, seed->second)) starts.push_back(*x);
  std::vector<int> used_facets;
  for (const Cand& c : cands) {
    if (static_cast<int>(starts.size()) >= cfg.starts + (seed ? 1 : 0)) break;
    if (c.v >= 1.0) break;
    const int pf = past.facet[c.i];
    if (std::find(used_facets.begin(), used_facets.end(), pf) != used_facets.end()) continue;
    if (auto x = obj.params(past.chart[c.i], fut.chart[c.j])) {
      used_facets.push_back(pf);
      starts.push_back(*x);
    }
  }

  // Alternating refinement from every scan pair. Sampling leaves one local maximum per
  // pleat near the optimum (for shears the continuum width is attained along a whole
  // geodesic), so all of them are visited; each run is cheap.
  Pair alt_best{};
  double alt_value = -1;
  {
    int runs = 0;
    for (const Cand& c : cands) {
      if (runs >= cfg.alternations) break;
      ++runs;
      const Pair r = alternate(h, {past.chart[c.i], past.facet[c.i]}, {fut.chart[c.j], fut.facet[c.j]});
      const double d = chart_separation(r.p.x, r.q.x);
      if (d > alt_value) alt_value = d, alt_best = r;
    }
    if (alt_value > 0)
      if (auto x = obj.params(alt_best.p.x, alt_best.q.x)) starts.insert(starts.begin(), *x);
  }

  long evals = 0;
  const long per_run = std::max<long>(400, cfg.max_evals / (2 * static_cast<long>(starts.size()) + 2));
  const Vec4 step0{0.5 * edge, 0.5 * edge, 0.05, 0.05};
  NM4 best{{0, 0, 0, 0}, -std::numeric_limits<double>::infinity()};
  for (const Vec4& x0 : starts) {
    if (evals >= cfg.max_evals) break;
    const NM4 r = detail::nelder_mead_max<4>(obj, evals, x0, step0, per_run, 1e-15, 1e-14);
    if (better(r, best)) best = r;
  }
  Vec4 step = step0;
  for (int polish = 0; polish < 60 && evals < cfg.max_evals && std::isfinite(best.f); ++polish) {
    const NM4 r = detail::nelder_mead_max<4>(obj, evals, best.x, step, per_run, 1e-16, 1e-15);
    const bool improved = r.f > best.f + 1e-15 * (1 + best.f);
    if (better(r, best)) best = r;
    if (!improved) {
      if (step[0] < 1e-9 * (1 + edge)) break;
      for (auto& s : step) s *= 0.1;
    }
  }

  WidthEstimate e;
  e.samples = static_cast<int>(h.points.size());
  e.evaluations = evals;
  if (!(best.f > 0)) {
    // No timelike chord found; report a zero-length witness at a facet point.
    const Eigen::Vector3d c = past.chart.empty() ? h.points[h.facets[0].v[0]] : past.chart.front();
    e.p_chart = e.q_chart = c;
    e.p = e.q = chart_lift(c);
    return e;
  }
  const Chord ch = obj.chord(best.x);
  Eigen::Vector3d p = ch.lo, q = ch.hi;
  double value = ch.length;
  if (alt_value > value) value = alt_value, p = alt_best.p.x, q = alt_best.q.x;
  if (ch.lo_facet >= 0 && ch.hi_facet >= 0 && h.facet_class[ch.lo_facet] == FacetClass::Past &&
      h.facet_class[ch.hi_facet] == FacetClass::Future) {
    const Pair r = alternate(h, {p, ch.lo_facet}, {q, ch.hi_facet});
    const double d = chart_separation(r.p.x, r.q.x);
    if (d > value) value = d, p = r.p.x, q = r.q.x;
  }
  e.value = value;
  e.p_chart = p;
  e.q_chart = q;
  e.p = unit_lift(p);
  e.q = unit_lift(q);
  return e;
}

ConvexHull3 classified_hull(const BoundaryCurve& c) {
  ConvexHull3 h = convex_hull(c.chart_points);
  h.facet_class = classify_facets(h);
  return h;
}

}  // namespace

WidthEstimate width_estimate(const ConvexHull3& h, const WidthConfig& cfg) {
  if (!h.degenerate && h.facet_class.size() != h.facets.size()) {
    ConvexHull3 hc = h;
    hc.facet_class = classify_facets(hc);
    return search(hc, cfg, std::nullopt);
  }
  return search(h, cfg, std::nullopt);
}

WidthEstimate width_estimate(const BoundaryCurve& c, const WidthConfig& cfg) {
  // Coarse to fine over every-other-point subsets. Hulls of nested subsets are nested,
  // so a witness chord from a coarser level is a chord of the finer hull too.
  constexpr std::size_t kCoarsest = 64;
  std::vector<BoundaryCurve> levels{c};
  while (levels.back().size() % 2 == 0 && levels.back().size() / 2 >= kCoarsest) {
    BoundaryCurve sub;
    for (std::size_t i = 0; i < levels.back().size(); i += 2) {
      sub.points.push_back(levels.back().points[i]);
      sub.chart_points.push_back(levels.back().chart_points[i]);
    }
    levels.push_back(std::move(sub));
  }
  std::optional<std::pair<Eigen::Vector3d, Eigen::Vector3d>> seed;
  WidthEstimate e;
  long evals = 0;
  for (auto it = levels.rbegin(); it != levels.rend(); ++it) {
    e = search(classified_hull(*it), cfg, seed);
    evals += e.evaluations;
    if (!e.degenerate) seed = std::make_pair(e.p_chart, e.q_chart);
  }
  e.evaluations = evals;
  return e;
}

WidthEstimate width_estimate(const CircleHomeo& phi, const WidthConfig& cfg) {
  if (cfg.samples < 64) throw Error(ErrorCode::ConfigInvalid, "width refinement needs samples >= 64");
  if (cfg.max_iters < 1) throw Error(ErrorCode::ConfigInvalid, "width refinement needs max_iters >= 1");
  int n = cfg.samples;
  WidthEstimate cur = width_estimate(graph_samples(phi, n), cfg);
  cur.flagged = true;
  for (int it = 1; it <= cfg.max_iters; ++it) {
    n *= 2;
    WidthEstimate next =
        search(classified_hull(graph_samples(phi, n)), cfg, std::make_pair(cur.p_chart, cur.q_chart));
    next.iterations = it;
    next.last_increment = next.value - cur.value;
    next.evaluations += cur.evaluations;
    const bool settled = std::abs(next.last_increment) <= cfg.tol;
    next.flagged = !settled;
    cur = next;
    if (settled) break;
  }
  return cur;
}

}  // namespace ads3

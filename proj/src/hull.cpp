// Quickhull in R^3 with conflict lists. Points within eps of a face plane count as
// on it; eps scales with the coordinate magnitudes.

#include "ads3/hull.hpp"

#include <algorithm>
#include <cstdint>
#include <limits>
#include <unordered_map>

#include "ads3/errors.hpp"

namespace ads3 {

const char* to_string(FacetClass c) {
  switch (c) {
    case FacetClass::Past: return "past";
    case FacetClass::Future: return "future";
    case FacetClass::Lateral: return "lateral";
  }
  return "?";
}

namespace {

constexpr double kFlatThickness = 1e-9;

struct Face {
  std::array<int, 3> v;
  Eigen::Vector3d n;
  double off;
  std::vector<int> outside;
  int furthest = -1;
  double furthest_dist = 0;
  bool alive = true;
};

std::int64_t edge_key(int a, int b) { return (static_cast<std::int64_t>(a) << 32) | static_cast<std::uint32_t>(b); }

class Builder {
 public:
  Builder(const std::vector<Eigen::Vector3d>& p, double eps) : p_(p), eps_(eps) {}

  int add_face(int a, int b, int c) {
    Face f;
    f.v = {a, b, c};
    const Eigen::Vector3d nn = (p_[b] - p_[a]).cross(p_[c] - p_[a]);
    const double len = nn.norm();
    f.n = len > 0 ? Eigen::Vector3d(nn / len) : Eigen::Vector3d::Zero();
    f.off = f.n.dot((p_[a] + p_[b] + p_[c]) / 3.0);
    const int id = static_cast<int>(faces_.size());
    faces_.push_back(std::move(f));
    edges_[edge_key(a, b)] = id;
    edges_[edge_key(b, c)] = id;
    edges_[edge_key(c, a)] = id;
    return id;
  }

  double dist(int f, int i) const { return faces_[f].n.dot(p_[i]) - faces_[f].off; }

  void assign(int i, const std::vector<int>& candidates) {
    for (int f : candidates) {
      const double d = dist(f, i);
      if (d > eps_) {
        Face& F = faces_[f];
        F.outside.push_back(i);
        if (d > F.furthest_dist) F.furthest_dist = d, F.furthest = i;
        return;
      }
    }
  }

  int twin(int a, int b) const {
    auto it = edges_.find(edge_key(b, a));
    return it == edges_.end() ? -1 : it->second;
  }

  void run() {
    for (std::size_t f = 0; f < faces_.size(); ++f) {
      if (!faces_[f].alive || faces_[f].outside.empty()) continue;
      const int eye = faces_[f].furthest;

      // Faces visible from the eye, grown across edges from f.
      std::vector<int> visible{static_cast<int>(f)};
      std::vector<char> mark(faces_.size(), 0);
      mark[f] = 1;
      for (std::size_t k = 0; k < visible.size(); ++k) {
        const Face& F = faces_[visible[k]];
        for (int e = 0; e < 3; ++e) {
          const int g = twin(F.v[e], F.v[(e + 1) % 3]);
          if (g >= 0 && !mark[g] && faces_[g].alive && dist(g, eye) > eps_) {
            mark[g] = 1;
            visible.push_back(g);
          }
        }
      }
      std::vector<std::pair<int, int>> horizon;
      for (int vf : visible) {
        const Face& F = faces_[vf];
        for (int e = 0; e < 3; ++e) {
          const int a = F.v[e], b = F.v[(e + 1) % 3];
          const int g = twin(a, b);
          if (g < 0 || !mark[g]) horizon.emplace_back(a, b);
        }
      }
      std::vector<int> orphans;
      for (int vf : visible) {
        Face& F = faces_[vf];
        F.alive = false;
        for (int e = 0; e < 3; ++e) {
          auto it = edges_.find(edge_key(F.v[e], F.v[(e + 1) % 3]));
          if (it != edges_.end() && it->second == vf) edges_.erase(it);
        }
        for (int i : F.outside)
          if (i != eye) orphans.push_back(i);
        F.outside.clear();
        F.outside.shrink_to_fit();
      }
      std::vector<int> fresh;
      fresh.reserve(horizon.size());
      for (auto [a, b] : horizon) fresh.push_back(add_face(a, b, eye));
      for (int i : orphans) assign(i, fresh);
    }
  }

  std::vector<Face> faces_;

 private:
  const std::vector<Eigen::Vector3d>& p_;
  double eps_;
  std::unordered_map<std::int64_t, int> edges_;
};

}  // namespace

double ConvexHull3::signed_distance(const Eigen::Vector3d& x) const {
  if (degenerate) return std::abs(flat_normal.dot(x) - flat_offset);
  double m = -std::numeric_limits<double>::infinity();
  for (const auto& f : facets) m = std::max(m, f.normal.dot(x) - f.offset);
  return m;
}

double ConvexHull3::boundary_distance(const Eigen::Vector3d& x) const {
  double best = std::numeric_limits<double>::infinity();
  if (degenerate) return std::abs(flat_normal.dot(x) - flat_offset);
  for (const auto& f : facets) {
    // Closest point on a triangle: interior projection or the nearest edge point.
    const Eigen::Vector3d &a = points[f.v[0]], &b = points[f.v[1]], &c = points[f.v[2]];
    const double h = f.normal.dot(x) - f.offset;
    const Eigen::Vector3d y = x - h * f.normal;
    const double w0 = f.normal.dot((b - y).cross(c - y)), w1 = f.normal.dot((c - y).cross(a - y)),
                 w2 = f.normal.dot((a - y).cross(b - y));
    if (w0 >= 0 && w1 >= 0 && w2 >= 0) {
      best = std::min(best, std::abs(h));
      continue;
    }
    for (int e = 0; e < 3; ++e) {
      const Eigen::Vector3d& p = points[f.v[e]];
      const Eigen::Vector3d q = points[f.v[(e + 1) % 3]] - p;
      const double t = std::clamp((x - p).dot(q) / q.squaredNorm(), 0.0, 1.0);
      best = std::min(best, (x - p - t * q).norm());
    }
  }
  return best;
}

std::vector<int> ConvexHull3::vertex_indices() const {
  std::vector<int> out;
  for (const auto& f : facets) out.insert(out.end(), f.v.begin(), f.v.end());
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

ConvexHull3 convex_hull(const std::vector<Eigen::Vector3d>& pts) {
  const int n = static_cast<int>(pts.size());
  if (n < 4) throw Error(ErrorCode::TooFewPoints, "convex hull needs at least 4 points");
  ConvexHull3 h;
  h.points = pts;

  Eigen::Vector3d amax = Eigen::Vector3d::Zero();
  for (const auto& p : pts) {
    if (!p.allFinite()) throw Error(ErrorCode::OutOfRange, "non-finite hull input");
    amax = amax.cwiseMax(p.cwiseAbs());
  }
  h.eps = 16 * std::numeric_limits<double>::epsilon() * amax.sum();

  // Initial simplex: the farthest pair among axis extremes, the point farthest
  // from their line, then the point farthest from that plane.
  std::array<int, 6> ext{};
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < 3; ++k) {
      if (pts[i][k] < pts[ext[2 * k]][k]) ext[2 * k] = i;
      if (pts[i][k] > pts[ext[2 * k + 1]][k]) ext[2 * k + 1] = i;
    }
  int a = ext[0], b = ext[1];
  double best = -1;
  for (int i : ext)
    for (int j : ext)
      if ((pts[i] - pts[j]).squaredNorm() > best) best = (pts[i] - pts[j]).squaredNorm(), a = i, b = j;
  const Eigen::Vector3d ab = (pts[b] - pts[a]).normalized();
  int c = -1;
  best = -1;
  for (int i = 0; i < n; ++i) {
    const Eigen::Vector3d r = pts[i] - pts[a];
    const double d = (r - r.dot(ab) * ab).squaredNorm();
    if (d > best) best = d, c = i;
  }
  const Eigen::Vector3d nrm = (pts[b] - pts[a]).cross(pts[c] - pts[a]).normalized();
  const double off = nrm.dot(pts[a]);
  int d = -1;
  double dmax = 0;
  for (int i = 0; i < n; ++i) {
    const double s = std::abs(nrm.dot(pts[i]) - off);
    if (s > dmax) dmax = s, d = i;
  }
  h.thickness = dmax;
  if (!(best > 0) || dmax < std::max(kFlatThickness, h.eps)) {
    h.degenerate = true;
    h.flat_normal = nrm.allFinite() ? nrm : Eigen::Vector3d::UnitZ();
    h.flat_offset = h.flat_normal.dot(pts[a]);
    return h;
  }

  Builder B(pts, h.eps);
  if (nrm.dot(pts[d]) - off > 0) std::swap(b, c);  // d below face (a, b, c)
  B.add_face(a, b, c);
  B.add_face(a, d, b);
  B.add_face(b, d, c);
  B.add_face(c, d, a);
  const std::vector<int> first{0, 1, 2, 3};
  for (int i = 0; i < n; ++i)
    if (i != a && i != b && i != c && i != d) B.assign(i, first);
  B.run();

  std::vector<int> remap(B.faces_.size(), -1);
  for (std::size_t f = 0; f < B.faces_.size(); ++f)
    if (B.faces_[f].alive) {
      remap[f] = static_cast<int>(h.facets.size());
      HullFacet hf;
      hf.v = B.faces_[f].v;
      hf.normal = B.faces_[f].n;
      hf.offset = B.faces_[f].off;
      h.facets.push_back(hf);
    }
  for (std::size_t f = 0; f < B.faces_.size(); ++f) {
    if (remap[f] < 0) continue;
    HullFacet& hf = h.facets[remap[f]];
    for (int e = 0; e < 3; ++e) {
      const int g = B.twin(hf.v[e], hf.v[(e + 1) % 3]);
      hf.neighbor[e] = g >= 0 ? remap[g] : -1;
    }
  }
  return h;
}

LorentzVec facet_dual(const HullFacet& f) { return {f.normal.x(), f.normal.y(), f.offset, -f.normal.z()}; }

std::vector<FacetClass> classify_facets(const ConvexHull3& h, double tol) {
  std::vector<FacetClass> out;
  out.reserve(h.facets.size());
  for (const auto& f : h.facets) {
    const LorentzVec p = facet_dual(f);
    if (inner(p, p) > tol * (1.0 + f.offset * f.offset))
      throw Error(ErrorCode::ClassificationAmbiguous, "timelike support plane; input is not achronal");
    const Eigen::Vector3d x = (h.points[f.v[0]] + h.points[f.v[1]] + h.points[f.v[2]]) / 3.0;
    const Eigen::Vector3d fut(x.x() * x.z(), x.y() * x.z(), 1 + x.z() * x.z());
    const double s = f.normal.dot(fut) / fut.norm();
    out.push_back(s < -tol ? FacetClass::Past : s > tol ? FacetClass::Future : FacetClass::Lateral);
  }
  return out;
}

}  // namespace ads3

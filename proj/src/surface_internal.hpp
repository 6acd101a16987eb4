#pragma once

// Pieces shared by the surface sources: the 5x5 difference block around a vertex
// and the shape computation from an embedding jet.

#include <array>

#include "ads3/surface.hpp"

namespace ads3::detail {

struct JetWeights {
  double X = 0, r = 0, t = 0, rr = 0, rt = 0, tt = 0;
};

// Node (a, b) of the block at ring i is the extended grid point (first + a, j - 2 + b).
struct Block {
  int first = 0;
  int ia = 0;  // the vertex's own row, i - first
  std::array<std::array<JetWeights, 5>, 5> w{};
};

Block block_weights(const Stencils& s, int i);

inline std::size_t node_vertex(const PolarGrid& g, const Block& b, int j, int a, int c) {
  return g.resolve(b.first + a, j - 2 + c);
}

inline void add_node(EmbeddingJet& J, const JetWeights& w, const LorentzVec& x) {
  J.X += w.X * x;
  J.r += w.r * x;
  J.t += w.t * x;
  J.rr += w.rr * x;
  J.rt += w.rt * x;
  J.tt += w.tt * x;
}

// Spacelike means the metric exceeds 1e-8 times dr^2 + sinh^2 r dtheta^2, the hyperbolic
// metric of the parameter disk; the raw (r, theta) eigenvalue would shrink with r at the pole.
bool shape_from_jet(const EmbeddingJet& J, double r, VertexGeometry& out);

// tr B alone (future normal); NaN when the tangent plane is not spacelike.
double mean_curvature(const EmbeddingJet& J, double r);

// tr B and its derivative along the jet variation dJ (exact product rule; a
// finite-difference quotient loses the cancellation between the large pole entries).
double mean_curvature(const EmbeddingJet& J, const EmbeddingJet& dJ, double r, double& dH);

// Largest |eigenvalue| of I^{-1} S for symmetric S: the operator norm in the metric I.
double metric_op_norm(const Eigen::Matrix2d& I, const Eigen::Matrix2d& S);

}  // namespace ads3::detail

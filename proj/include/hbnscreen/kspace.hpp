#pragma once

#include <string>
#include <utility>
#include <vector>

#include "hbnscreen/types.hpp"

namespace hbn::kspace {

// Sampling of the Brillouin zone in fractional coordinates of the reciprocal
// basis of whatever cell is being solved. Points live in [-0.5, 0.5)^2 and
// the weights sum to one.
struct KGrid {
  std::vector<Vec2> points;
  std::vector<double> weights;

  int size() const { return int(points.size()); }
};

// Standard Monkhorst-Pack mesh: coordinates (2i - n - 1) / (2n), i = 1..n.
// Even n avoids the zone center.
KGrid monkhorst_pack(int n1, int n2);

// Uniform mesh i/n folded into [-0.5, 0.5); always contains the zone center.
KGrid gamma_centered(int n1, int n2);

// b1, b2 with a_i . b_j = 2 pi delta_ij for in-plane cell vectors a1, a2.
std::pair<Vec2, Vec2> reciprocal_vectors(const Vec2& a1, const Vec2& a2);

// Piecewise-linear walk Gamma -> M -> K -> Gamma, M = (1/2, 0) and
// K = (1/3, 1/3) in fractional coordinates. `per_segment` points per leg
// including both endpoints; shared endpoints are not duplicated.
struct KPath {
  std::vector<Vec2> samples;            // fractional coordinates
  std::vector<double> cumulative;       // cartesian arc length from Gamma
  std::vector<std::string> vertex_labels;
  std::vector<int> vertex_indices;      // positions of the vertices in samples
};

KPath high_symmetry_path(const Vec2& a1, const Vec2& a2, int per_segment);

} // namespace hbn::kspace

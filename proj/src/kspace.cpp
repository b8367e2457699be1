#include "hbnscreen/kspace.hpp"

#include <cmath>
#include <stdexcept>

namespace hbn::kspace {

namespace {

void check_mesh(int n1, int n2) {
  if (n1 < 1 || n2 < 1)
    throw std::invalid_argument("k-mesh divisions must be >= 1");
}

double fold_half(double x) {
  // Into [-0.5, 0.5).
  double f = x - std::floor(x + 0.5);
  if (f >= 0.5) f -= 1.0; // guards the x = 0.5 - eps roundoff case
  return f;
}

} // namespace

KGrid monkhorst_pack(int n1, int n2) {
  check_mesh(n1, n2);
  KGrid grid;
  grid.points.reserve(size_t(n1) * n2);
  const double w = 1.0 / (double(n1) * double(n2));
  for (int i = 1; i <= n1; ++i) {
    for (int j = 1; j <= n2; ++j) {
      double k1 = double(2 * i - n1 - 1) / double(2 * n1);
      double k2 = double(2 * j - n2 - 1) / double(2 * n2);
      grid.points.emplace_back(k1, k2);
      grid.weights.push_back(w);
    }
  }
  return grid;
}

KGrid gamma_centered(int n1, int n2) {
  check_mesh(n1, n2);
  KGrid grid;
  grid.points.reserve(size_t(n1) * n2);
  const double w = 1.0 / (double(n1) * double(n2));
  for (int i = 0; i < n1; ++i) {
    for (int j = 0; j < n2; ++j) {
      grid.points.emplace_back(fold_half(double(i) / n1), fold_half(double(j) / n2));
      grid.weights.push_back(w);
    }
  }
  return grid;
}

std::pair<Vec2, Vec2> reciprocal_vectors(const Vec2& a1, const Vec2& a2) {
  const double cross = a1.x() * a2.y() - a1.y() * a2.x();
  if (std::abs(cross) < 1e-300)
    throw std::invalid_argument("cell vectors are collinear");
  const double pre = 2.0 * M_PI / cross;
  Vec2 b1(pre * a2.y(), -pre * a2.x());
  Vec2 b2(-pre * a1.y(), pre * a1.x());
  return {b1, b2};
}

KPath high_symmetry_path(const Vec2& a1, const Vec2& a2, int per_segment) {
  if (per_segment < 2)
    throw std::invalid_argument("path needs at least 2 points per segment");

  const Vec2 gamma(0.0, 0.0);
  const Vec2 m(0.5, 0.0);
  const Vec2 k(1.0 / 3.0, 1.0 / 3.0);
  const std::vector<Vec2> verts = {gamma, m, k, gamma};
  const std::vector<std::string> labels = {"G", "M", "K", "G"};

  auto [b1, b2] = reciprocal_vectors(a1, a2);
  auto cart = [&](const Vec2& frac) -> Vec2 { return frac.x() * b1 + frac.y() * b2; };

  KPath path;
  path.vertex_labels = labels;
  double arc = 0.0;
  for (size_t seg = 0; seg + 1 < verts.size(); ++seg) {
    const Vec2 from = verts[seg];
    const Vec2 to = verts[seg + 1];
    const double seg_len = (cart(to) - cart(from)).norm();
    const int start = (seg == 0) ? 0 : 1; // joints appear once
    for (int p = start; p < per_segment; ++p) {
      double t = double(p) / double(per_segment - 1);
      path.samples.push_back(from + t * (to - from));
      path.cumulative.push_back(arc + t * seg_len);
      if (p == 0) path.vertex_indices.push_back(int(path.samples.size()) - 1);
    }
    path.vertex_indices.push_back(int(path.samples.size()) - 1);
    arc += seg_len;
  }
  return path;
}

} // namespace hbn::kspace

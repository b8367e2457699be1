#include "hbnscreen/classify.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace hbn::classify {

namespace {

constexpr double kOccTol = 1e-9;

double frac_dist(const Vec2& a, const Vec2& b) {
  double dx = a.x() - b.x();
  double dy = a.y() - b.y();
  dx -= std::round(dx);
  dy -= std::round(dy);
  return std::hypot(dx, dy);
}

// Name a primitive-zone point if the folded candidate set reaches one.
std::string point_label(const Vec2& k_super, int n1, int n2) {
  struct Named {
    const char* label;
    Vec2 frac;
  };
  const std::vector<Named> named = {
      {"G", {0.0, 0.0}},
      {"M", {0.5, 0.0}},
      {"M", {0.0, 0.5}},
      {"M", {0.5, 0.5}},
      {"K", {1.0 / 3.0, 1.0 / 3.0}},
      {"K", {2.0 / 3.0, 2.0 / 3.0}},
  };
  const double tol = 0.02;

  std::string best_label;
  double best = tol;
  Vec2 best_frac = Vec2::Zero();
  for (int m1 = 0; m1 < n1; ++m1) {
    for (int m2 = 0; m2 < n2; ++m2) {
      Vec2 prim((k_super.x() + m1) / double(n1), (k_super.y() + m2) / double(n2));
      for (const Named& nm : named) {
        double d = frac_dist(prim, nm.frac);
        if (d < best) {
          best = d;
          best_label = nm.label;
          best_frac = prim;
        }
      }
    }
  }
  if (!best_label.empty()) return best_label;
  std::ostringstream os;
  os.precision(4);
  os << "k=(" << k_super.x() << "," << k_super.y() << ")";
  return os.str();
}

struct BandSummary {
  double mean = 0.0;
  double lo = 0.0;
  double hi = 0.0;
  double occupation = 0.0;
};

// Grid statistics of band b in one spin channel.
BandSummary summarize_band(const electronic::EigenSolution& sol, int spin, int b) {
  BandSummary s;
  s.lo = std::numeric_limits<double>::infinity();
  s.hi = -s.lo;
  for (int k = 0; k < sol.grid.size(); ++k) {
    const double e = sol.spin[spin].eigenvalues[size_t(k)][b];
    const double w = sol.grid.weights[size_t(k)];
    s.mean += w * e;
    s.occupation += w * sol.spin[spin].occupancy[size_t(k)][b];
    s.lo = std::min(s.lo, e);
    s.hi = std::max(s.hi, e);
  }
  return s;
}

} // namespace

BandGap find_gap(const electronic::EigenSolution& sol, int n1, int n2) {
  if (sol.grid.size() < 1) throw std::invalid_argument("empty solution");
  if (n1 < 1 || n2 < 1) throw std::invalid_argument("bad supercell multiplicity");

  double vbm = -std::numeric_limits<double>::infinity();
  double cbm = std::numeric_limits<double>::infinity();
  double min_direct = std::numeric_limits<double>::infinity();
  Vec2 k_at = Vec2::Zero();

  for (int s = 0; s < 2; ++s) {
    for (int k = 0; k < sol.grid.size(); ++k) {
      const VectorX& eps = sol.spin[s].eigenvalues[size_t(k)];
      const VectorX& f = sol.spin[s].occupancy[size_t(k)];
      double vb = -std::numeric_limits<double>::infinity();
      double cb = std::numeric_limits<double>::infinity();
      for (int b = 0; b < eps.size(); ++b) {
        if (f[b] > kOccTol && f[b] < 1.0 - kOccTol)
          throw std::runtime_error("system is metallic: fractional filling at a sampled k-point");
        if (f[b] >= 1.0 - kOccTol)
          vb = std::max(vb, eps[b]);
        else
          cb = std::min(cb, eps[b]);
      }
      if (std::isinf(vb) || std::isinf(cb))
        throw std::runtime_error("cannot locate both band edges");
      vbm = std::max(vbm, vb);
      cbm = std::min(cbm, cb);
      if (cb - vb < min_direct) {
        min_direct = cb - vb;
        k_at = sol.grid.points[size_t(k)];
      }
    }
  }

  if (!(cbm > vbm))
    throw std::runtime_error("system is metallic: band edges overlap");

  BandGap gap;
  gap.vbm = vbm;
  gap.cbm = cbm;
  gap.k_frac = k_at;
  gap.direct = (min_direct - (cbm - vbm)) <= 1e-9;
  gap.direct_at = point_label(k_at, n1, n2);
  return gap;
}

std::vector<DefectLevel> extract_defect_levels(const electronic::EigenSolution& sol,
                                               const BandGap& gap,
                                               const LevelOptions& opts) {
  if (!(gap.cbm > gap.vbm)) throw std::invalid_argument("reference gap is not open");

  std::array<std::vector<DefectLevel>, 2> raw;
  const int n_bands = sol.orbitals.rows();
  for (int s = 0; s < 2; ++s) {
    for (int b = 0; b < n_bands; ++b) {
      BandSummary sum = summarize_band(sol, s, b);
      if (!(sum.mean > gap.vbm && sum.mean < gap.cbm)) continue;
      DefectLevel lvl;
      lvl.energy_ev = sum.mean;
      lvl.bandwidth_ev = sum.hi - sum.lo;
      lvl.spin = (s == 0) ? Spin::up : Spin::down;
      lvl.occupation = sum.occupation;
      lvl.occupied = sum.occupation > 0.5;
      raw[size_t(s)].push_back(lvl);
    }
  }

  // Merge opposite-spin partners within the degeneracy window; only levels
  // that agree on the occupation can be one doubly-degenerate state.
  std::vector<DefectLevel> levels;
  std::vector<char> used(raw[1].size(), 0);
  for (const DefectLevel& up : raw[0]) {
    int match = -1;
    double best = opts.degeneracy_tol_ev;
    for (size_t j = 0; j < raw[1].size(); ++j) {
      if (used[j]) continue;
      if (raw[1][j].occupied != up.occupied) continue;
      double d = std::abs(raw[1][j].energy_ev - up.energy_ev);
      if (d <= best) {
        best = d;
        match = int(j);
      }
    }
    if (match >= 0) {
      used[size_t(match)] = 1;
      const DefectLevel& dn = raw[1][size_t(match)];
      DefectLevel merged = up;
      merged.spin = Spin::degenerate;
      merged.energy_ev = 0.5 * (up.energy_ev + dn.energy_ev);
      merged.bandwidth_ev = std::max(up.bandwidth_ev, dn.bandwidth_ev);
      merged.occupation = 0.5 * (up.occupation + dn.occupation);
      levels.push_back(merged);
    } else {
      levels.push_back(up);
    }
  }
  for (size_t j = 0; j < raw[1].size(); ++j)
    if (!used[j]) levels.push_back(raw[1][j]);

  for (DefectLevel& lvl : levels) {
    lvl.edge_distance_ev =
        std::min(lvl.energy_ev - gap.vbm, gap.cbm - lvl.energy_ev);
    lvl.depth = classify_depth(lvl.energy_ev, lvl.bandwidth_ev, gap,
                               opts.edge_margin_ev, opts.flat_tol_ev);
  }
  std::sort(levels.begin(), levels.end(),
            [](const DefectLevel& a, const DefectLevel& b) {
              if (a.energy_ev != b.energy_ev) return a.energy_ev < b.energy_ev;
              return int(a.spin) < int(b.spin);
            });
  return levels;
}

Depth classify_depth(double energy_ev, double bandwidth_ev, const BandGap& gap,
                     double edge_margin_ev, double flat_tol_ev) {
  if (edge_margin_ev < 0 || flat_tol_ev < 0)
    throw std::invalid_argument("classification margins must be >= 0");
  const double edge = std::min(energy_ev - gap.vbm, gap.cbm - energy_ev);
  return (edge >= edge_margin_ev && bandwidth_ev <= flat_tol_ev) ? Depth::deep
                                                                 : Depth::shallow;
}

Transition first_order_transition(const std::vector<DefectLevel>& levels,
                                  const spectra::Spectrum& spectrum,
                                  const BandGap& gap, const std::string& defect_name,
                                  int charge) {
  Transition t;
  t.defect = defect_name;
  t.charge = charge;

  const DefectLevel* final_lvl = nullptr;
  for (const DefectLevel& lvl : levels) {
    if (lvl.occupied) continue;
    if (!final_lvl || lvl.energy_ev < final_lvl->energy_ev) final_lvl = &lvl;
  }
  if (!final_lvl) {
    t.exists = false;
    t.type = "none";
    return t;
  }

  const DefectLevel* initial_lvl = nullptr;
  for (const DefectLevel& lvl : levels) {
    if (!lvl.occupied || lvl.energy_ev >= final_lvl->energy_ev) continue;
    if (!initial_lvl || lvl.energy_ev > initial_lvl->energy_ev) initial_lvl = &lvl;
  }

  t.exists = true;
  t.final_ev = final_lvl->energy_ev;
  if (initial_lvl) {
    t.initial_ev = initial_lvl->energy_ev;
  } else {
    t.initial_ev = gap.vbm;
    t.from_valence = true;
  }
  t.energy_ev = t.final_ev - t.initial_ev;
  t.wavelength_nm = kEvNm / t.energy_ev;

  const bool degenerate_pair = final_lvl->spin == Spin::degenerate &&
                               initial_lvl && initial_lvl->spin == Spin::degenerate;
  bool near_peak = false;
  if (spectrum.photon_ev.size() >= 2) {
    const double spacing = spectrum.photon_ev[1] - spectrum.photon_ev[0];
    for (const spectra::Peak& p : spectrum.peaks) {
      if (std::abs(p.energy_ev - t.energy_ev) <= spacing + 1e-12) {
        near_peak = true;
        break;
      }
    }
  }
  if (degenerate_pair)
    t.type = "degenerate";
  else if (near_peak)
    t.type = "radiative";
  else
    t.type = "non-radiative";
  return t;
}

Histogram histogram(const std::vector<Transition>& transitions, double bin_width_ev) {
  if (!(bin_width_ev > 0)) throw std::invalid_argument("bin width must be positive");
  Histogram h;
  h.bin_width = bin_width_ev;

  double top = 0.0;
  for (const Transition& t : transitions)
    if (t.exists) top = std::max(top, t.energy_ev);
  const int n_bins = (top > 0) ? int(std::floor(top / bin_width_ev)) + 1 : 0;
  h.bins.resize(size_t(n_bins));
  for (int i = 0; i < n_bins; ++i) {
    h.bins[size_t(i)].lo = i * bin_width_ev;
    h.bins[size_t(i)].hi = (i + 1) * bin_width_ev;
  }
  for (const Transition& t : transitions) {
    if (!t.exists) continue;
    int bin = std::min(n_bins - 1, int(std::floor(t.energy_ev / bin_width_ev)));
    ++h.bins[size_t(bin)].counts[t.type];
    ++h.total;
  }
  return h;
}

} // namespace hbn::classify

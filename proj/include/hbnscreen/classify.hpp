#pragma once

#include <map>
#include <string>
#include <vector>

#include "hbnscreen/electronic.hpp"
#include "hbnscreen/spectra.hpp"
#include "hbnscreen/types.hpp"

namespace hbn::classify {

struct BandGap {
  double vbm = 0.0;
  double cbm = 0.0;
  bool direct = false;
  Vec2 k_frac = Vec2::Zero(); // sampled k of the minimal per-k gap
  std::string direct_at;      // "G", "M", "K" or the folded coordinates

  double gap() const { return cbm - vbm; }
};

// Band edges of a gapped reference solution. n1, n2 unfold the sampled point
// onto the primitive zone so the location can be named. Throws
// std::runtime_error when the filling is metallic or the gap closes.
BandGap find_gap(const electronic::EigenSolution& sol, int n1, int n2);

enum class Spin { up, down, degenerate };
enum class Depth { deep, shallow };

struct DefectLevel {
  double energy_ev = 0.0;    // grid-averaged
  double bandwidth_ev = 0.0; // max - min across the sampled grid
  Spin spin = Spin::up;
  bool occupied = false;
  double occupation = 0.0;   // grid-averaged filling
  double edge_distance_ev = 0.0;
  Depth depth = Depth::shallow;
};

struct LevelOptions {
  double degeneracy_tol_ev = 1e-3; // cross-spin merge window
  double edge_margin_ev = 0.5;
  double flat_tol_ev = 0.1;
};

// In-gap levels of a defect solution measured against the pristine band
// edges: bands whose averaged energy falls strictly inside the gap. Levels
// of opposite spin closer than the degeneracy tolerance (and equally
// occupied) merge into one entry labeled degenerate. Sorted by energy.
std::vector<DefectLevel> extract_defect_levels(const electronic::EigenSolution& sol,
                                               const BandGap& gap,
                                               const LevelOptions& opts = {});

// Deep means far from both edges and flat across the zone.
Depth classify_depth(double energy_ev, double bandwidth_ev, const BandGap& gap,
                     double edge_margin_ev, double flat_tol_ev);

struct Transition {
  std::string defect;
  int charge = 0;
  bool exists = false;     // false when there is no unoccupied gap level
  double energy_ev = 0.0;
  double wavelength_nm = 0.0;
  double initial_ev = 0.0;
  double final_ev = 0.0;
  bool from_valence = false; // initial state is the valence-band maximum
  std::string type = "none"; // radiative | non-radiative | degenerate | none
};

// Lowest-energy excitation: highest occupied gap level (or the valence-band
// maximum) into the lowest unoccupied gap level. Radiative when the
// absorption spectrum shows a peak within one grid spacing of the energy;
// degenerate when both ends of the transition are degeneracy-labeled.
Transition first_order_transition(const std::vector<DefectLevel>& levels,
                                  const spectra::Spectrum& spectrum,
                                  const BandGap& gap, const std::string& defect_name,
                                  int charge);

struct Histogram {
  double bin_width = 0.25;
  struct Bin {
    double lo = 0.0;
    double hi = 0.0;
    std::map<std::string, int> counts; // per transition type
  };
  std::vector<Bin> bins;
  int total = 0;
};

// Counts transitions (those that exist) into fixed-width energy bins,
// bucketed by type.
Histogram histogram(const std::vector<Transition>& transitions,
                    double bin_width_ev = 0.25);

} // namespace hbn::classify

#pragma once

#include <array>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "hbnscreen/geometry.hpp"
#include "hbnscreen/kspace.hpp"
#include "hbnscreen/types.hpp"

namespace hbn::electronic {

// One p_z orbital per occupied site, nearest-neighbor hopping with a
// power-law distance dependence, and an on-site mean-field Hubbard term
// U (<n_opposite> - 1/2).
struct TBParams {
  std::map<std::string, double> onsite; // eV per species
  double t0 = 2.5;                      // eV, hopping at distance d0
  double d0 = 1.445685074050823;        // angstrom, pristine bond length a0/sqrt(3)
  double eta = 2.0;                     // hopping decay exponent
  double U = 2.0;                       // eV, on-site repulsion
  double hopping_cutoff = 2.2;          // angstrom at zero strain
  geometry::SpeciesTable species;       // pi donor counts

  double onsite_of(const std::string& s) const;
  double hopping(double distance) const;
};

TBParams default_params();
TBParams load_params(const std::string& path);
void save_params(const TBParams& params, const std::string& path);

// Calibration file: lines "DEFECT.onsite.SPECIES = value". Returns the
// overrides recorded for one defect name.
std::map<std::string, double> load_calibration(const std::string& path,
                                               const std::string& defect_name);
TBParams with_overrides(const TBParams& base,
                        const std::map<std::string, double>& onsite_overrides);

// Row <-> site bookkeeping; vacant sites carry no orbital.
struct OrbitalMap {
  std::vector<int> site_of_row;
  std::vector<int> row_of_site; // -1 for vacant

  int rows() const { return int(site_of_row.size()); }
};

OrbitalMap make_orbital_map(const geometry::Supercell& cell);

// Spin-resolved mean p_z occupations, one row per site (vacant rows zero).
struct MeanFieldState {
  MatrixX occupation; // n_sites x 2, columns = up, down; entries in [0, 1]
  double total_energy = 0.0;
  int iterations = 0;
  std::vector<double> energy_history;   // E after each sweep, sweep 0 first
  std::vector<double> residual_history; // |E_m - E_{m-1}| for m >= 1
};

struct SpinChannel {
  std::vector<VectorX> eigenvalues;   // per k, ascending
  std::vector<MatrixXc> eigenvectors; // per k, columns match eigenvalues
  std::vector<VectorX> occupancy;     // per k, filling in [0, 1] per band
};

struct EigenSolution {
  kspace::KGrid grid;
  std::array<SpinChannel, 2> spin; // [0] = up, [1] = down
  OrbitalMap orbitals;
  double fermi_level = 0.0;
  int electron_count = 0;
};

// Bloch Hamiltonian at fractional k for one spin channel. `opposite_occ` is
// the per-site occupation of the other spin; `field` (optional, per site)
// is added to the diagonal and is only used to break spin symmetry on the
// first SCF sweep.
MatrixXc assemble_hamiltonian(const geometry::Supercell& cell, const TBParams& params,
                              const geometry::NeighborList& bonds, const OrbitalMap& map,
                              const Vec2& k_frac, const VectorX& opposite_occ,
                              const VectorX& field = VectorX());

struct ScfOptions {
  double tol_ev = 1e-4;   // on the total-energy change per sweep
  int max_iter = 500;
  double mixing = 0.3;    // linear mixing weight of the fresh occupations
  double seed_field_ev = 0.1;
  bool seed = true;       // symmetry-broken start around defects
  MatrixX initial_occupation; // optional; empty = species-based guess
};

struct ScfError : std::runtime_error {
  std::vector<double> residual_history;
  ScfError(const std::string& msg, std::vector<double> history)
      : std::runtime_error(msg), residual_history(std::move(history)) {}
};

struct ScfResult {
  MeanFieldState mean_field;
  EigenSolution solution;
};

ScfResult scf_solve(const geometry::Supercell& cell, const TBParams& params,
                    const kspace::KGrid& grid, const ScfOptions& opts = {});

// Diagonalizes on a new grid with the mean field frozen, then refills the
// states for the cell's electron count.
EigenSolution solve_frozen(const geometry::Supercell& cell, const TBParams& params,
                           const MeanFieldState& mf, const kspace::KGrid& grid);

struct BandStructure {
  kspace::KPath path;
  std::array<MatrixX, 2> bands; // samples x bands, per spin
};

BandStructure band_structure(const geometry::Supercell& cell, const TBParams& params,
                             const MeanFieldState& mf, const kspace::KPath& path);

// Chooses onsite(B) = -onsite(N) and t0 so that the converged pristine cell
// shows the requested direct gap and valence bandwidth; all other entries
// of `base` are kept.
TBParams fit_pristine_params(double target_gap_ev, double target_bandwidth_ev,
                             const TBParams& base);

} // namespace hbn::electronic

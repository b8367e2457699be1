#pragma once

#include <array>
#include <vector>

#include "hbnscreen/electronic.hpp"
#include "hbnscreen/types.hpp"

namespace hbn::spectra {

enum class SpinSelect { up, down, both };

struct Curve {
  VectorX x;
  VectorX y;
};

VectorX uniform_grid(double lo, double hi, double step);

// Gaussian-broadened density of states. Each state carries its k-weight, so
// the curve integrates to the orbital count per selected spin channel.
Curve dos(const electronic::EigenSolution& sol, const VectorX& energy_grid,
          double sigma_ev, SpinSelect spin = SpinSelect::both);

// Squared in-plane position matrix elements |<f|r|i>|^2 between the
// zone-center eigenstates of one spin channel, site positions referenced to
// the defect centroid (or the mean site position of a pristine cell).
struct DipoleSet {
  std::array<MatrixX, 2> spin; // n x n, symmetric, angstrom^2
};

DipoleSet dipole_elements(const electronic::EigenSolution& sol,
                          const geometry::Supercell& cell);

struct Peak {
  double energy_ev;
  double height;
};

struct Spectrum {
  VectorX photon_ev;
  VectorX epsilon2;
  std::vector<Peak> peaks;
  double peak_floor = 0.0;
};

// Imaginary dielectric response from the zone-center transitions: Gaussian at
// each occupied -> unoccupied energy difference, weighted by the dipole and
// the occupation difference. Peaks are strict local maxima above the floor.
Spectrum epsilon2(const electronic::EigenSolution& sol, const DipoleSet& dipoles,
                  const VectorX& photon_grid, double sigma_ev, double peak_floor);

// Largest epsilon2 value of a reference solution, measured on a grid extended
// to cover all of its transitions; anchors the peak floor for defect runs
// whose own transitions may lie below the host absorption edge.
double reference_scale(const electronic::EigenSolution& sol, const DipoleSet& dipoles,
                       double sigma_ev, double step_ev);

} // namespace hbn::spectra

#include "hbnscreen/spectra.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace hbn::spectra {

namespace {

constexpr double kSqrt2Pi = 2.50662827463100050242;

double gaussian(double x, double sigma) {
  return std::exp(-0.5 * (x / sigma) * (x / sigma)) / (sigma * kSqrt2Pi);
}

int gamma_index(const electronic::EigenSolution& sol) {
  for (int k = 0; k < sol.grid.size(); ++k)
    if (sol.grid.points[size_t(k)].norm() < 1e-12) return k;
  throw std::invalid_argument("solution does not sample the zone center");
}

// Site positions relative to the defect centroid (pristine: mean position).
std::vector<Vec2> referenced_positions(const geometry::Supercell& cell) {
  Vec2 ref = Vec2::Zero();
  if (cell.defect && !cell.edited_sites.empty()) {
    for (int idx : cell.edited_sites) ref += cell.sites[size_t(idx)].position;
    ref /= double(cell.edited_sites.size());
  } else {
    for (const geometry::Site& s : cell.sites) ref += s.position;
    ref /= double(cell.sites.size());
  }
  std::vector<Vec2> out;
  out.reserve(cell.sites.size());
  for (const geometry::Site& s : cell.sites) out.push_back(s.position - ref);
  return out;
}

void check_sigma(double sigma) {
  if (!(sigma > 0)) throw std::invalid_argument("broadening must be positive");
}

std::vector<Peak> find_peaks(const VectorX& x, const VectorX& y, double floor) {
  std::vector<Peak> peaks;
  for (int i = 1; i + 1 < y.size(); ++i) {
    if (y[i] >= floor && y[i] > y[i - 1] && y[i] > y[i + 1])
      peaks.push_back({x[i], y[i]});
  }
  return peaks;
}

} // namespace

VectorX uniform_grid(double lo, double hi, double step) {
  if (!(step > 0) || !(hi > lo))
    throw std::invalid_argument("grid needs hi > lo and a positive step");
  const int n = int(std::floor((hi - lo) / step + 1e-9)) + 1;
  VectorX g(n);
  for (int i = 0; i < n; ++i) g[i] = lo + step * i;
  return g;
}

Curve dos(const electronic::EigenSolution& sol, const VectorX& energy_grid,
          double sigma_ev, SpinSelect spin) {
  check_sigma(sigma_ev);
  if (energy_grid.size() < 1) throw std::invalid_argument("empty energy grid");
  Curve curve;
  curve.x = energy_grid;
  curve.y = VectorX::Zero(energy_grid.size());
  const int s_lo = (spin == SpinSelect::down) ? 1 : 0;
  const int s_hi = (spin == SpinSelect::up) ? 1 : 2;
  for (int s = s_lo; s < s_hi; ++s) {
    for (int k = 0; k < sol.grid.size(); ++k) {
      const double w = sol.grid.weights[size_t(k)];
      const VectorX& eps = sol.spin[s].eigenvalues[size_t(k)];
      for (int b = 0; b < eps.size(); ++b)
        for (int i = 0; i < curve.x.size(); ++i)
          curve.y[i] += w * gaussian(curve.x[i] - eps[b], sigma_ev);
    }
  }
  return curve;
}

DipoleSet dipole_elements(const electronic::EigenSolution& sol,
                          const geometry::Supercell& cell) {
  const int k = gamma_index(sol);
  if (int(cell.sites.size()) != int(sol.orbitals.row_of_site.size()))
    throw std::invalid_argument("solution does not belong to this cell");
  const std::vector<Vec2> pos = referenced_positions(cell);

  DipoleSet set;
  for (int s = 0; s < 2; ++s) {
    const MatrixXc& vecs = sol.spin[s].eigenvectors[size_t(k)];
    const int n = int(vecs.cols());
    // <f| r |i> = sum_site conj(c_f) c_i r_site, one component at a time.
    MatrixXc rx = MatrixXc::Zero(n, n);
    MatrixXc ry = MatrixXc::Zero(n, n);
    VectorX x(vecs.rows()), y(vecs.rows());
    for (int r = 0; r < vecs.rows(); ++r) {
      const Vec2& p = pos[size_t(sol.orbitals.site_of_row[size_t(r)])];
      x[r] = p.x();
      y[r] = p.y();
    }
    rx = vecs.adjoint() * x.asDiagonal() * vecs;
    ry = vecs.adjoint() * y.asDiagonal() * vecs;
    set.spin[s] = rx.cwiseAbs2() + ry.cwiseAbs2();
  }
  return set;
}

Spectrum epsilon2(const electronic::EigenSolution& sol, const DipoleSet& dipoles,
                  const VectorX& photon_grid, double sigma_ev, double peak_floor) {
  check_sigma(sigma_ev);
  if (photon_grid.size() < 2)
    throw std::invalid_argument("photon grid needs at least two points");
  const int k = gamma_index(sol);

  Spectrum spec;
  spec.photon_ev = photon_grid;
  spec.epsilon2 = VectorX::Zero(photon_grid.size());
  spec.peak_floor = peak_floor;

  for (int s = 0; s < 2; ++s) {
    const VectorX& eps = sol.spin[s].eigenvalues[size_t(k)];
    const VectorX& f = sol.spin[s].occupancy[size_t(k)];
    const MatrixX& d2 = dipoles.spin[s];
    if (d2.rows() != eps.size())
      throw std::invalid_argument("dipole set does not match the solution");
    for (int i = 0; i < eps.size(); ++i) {
      if (f[i] <= 0.0) continue;
      for (int j = 0; j < eps.size(); ++j) {
        const double de = eps[j] - eps[i];
        if (de <= 0.0) continue;
        const double weight = f[i] * (1.0 - f[j]) * d2(i, j);
        if (weight <= 0.0) continue;
        for (int g = 0; g < photon_grid.size(); ++g)
          spec.epsilon2[g] += weight * gaussian(photon_grid[g] - de, sigma_ev);
      }
    }
  }
  spec.peaks = find_peaks(spec.photon_ev, spec.epsilon2, peak_floor);
  return spec;
}

double reference_scale(const electronic::EigenSolution& sol, const DipoleSet& dipoles,
                       double sigma_ev, double step_ev) {
  check_sigma(sigma_ev);
  const int k = gamma_index(sol);
  double top = 0.0;
  for (int s = 0; s < 2; ++s) {
    const VectorX& eps = sol.spin[s].eigenvalues[size_t(k)];
    const VectorX& f = sol.spin[s].occupancy[size_t(k)];
    for (int i = 0; i < eps.size(); ++i) {
      if (f[i] <= 0.0) continue;
      for (int j = 0; j < eps.size(); ++j) {
        if (f[j] >= 1.0) continue;
        if (eps[j] > eps[i]) top = std::max(top, eps[j] - eps[i]);
      }
    }
  }
  if (top == 0.0) return 0.0; // no transitions at all
  VectorX grid = uniform_grid(0.0, top + 5.0 * sigma_ev, step_ev);
  Spectrum spec = epsilon2(sol, dipoles, grid, sigma_ev, 0.0);
  return spec.epsilon2.maxCoeff();
}

} // namespace hbn::spectra

#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "hbnscreen/pipeline.hpp"
#include "hbnscreen/types.hpp"

namespace hbn::tuning {

// Emission wavelength as a function of biaxial strain; empty when the
// defect has no transition at that strain.
using WavelengthFn = std::function<std::optional<double>(double)>;

struct StrainSample {
  double strain = 0.0;
  bool has_transition = false;
  double energy_ev = 0.0;
  double wavelength_nm = 0.0;
  std::string type;
};

struct StrainCurve {
  std::string defect;
  std::vector<StrainSample> samples;
};

// Uniform grid of `points` strains spanning [lo, hi].
std::vector<double> strain_grid(double lo = -0.02, double hi = 0.02, int points = 9);

// Evaluates the transition across a strain grid. Strains where the
// transition disappears stay in the curve as gaps. Every |s| must be
// at most 0.05; a curve with no transition anywhere is an error.
StrainCurve sweep(pipeline::Pipeline& pipe, const geometry::DefectSpec& spec,
                  const std::vector<double>& strains);

struct CurveFit {
  int degree = 1;
  VectorX coeffs; // ascending powers of strain
  double rms_residual = 0.0;
  double eval(double s) const;
};

// Least-squares wavelength(strain) fit over the samples that carry a
// transition (at least three required). Upgrades from linear to
// quadratic only when that cuts the residual by 20% or more.
CurveFit fit_curve(const StrainCurve& curve);

struct TuneResult {
  double strain = 0.0;
  double wavelength_nm = 0.0;
  double energy_ev = 0.0;
  int iterations = 0;
  std::vector<std::pair<double, double>> trace; // (strain, wavelength) evaluations
};

// Bisects wavelength(strain) on [lo, hi] until the wavelength is within
// tol_nm of the target or the interval shrinks below 1e-6. Errors when
// the target lies outside the achievable range on the bracket.
TuneResult solve_strain_for_target(const WavelengthFn& fn, double target_nm,
                                   double lo, double hi, double tol_nm = 1.0);

TuneResult solve_strain_for_target(pipeline::Pipeline& pipe,
                                   const geometry::DefectSpec& spec,
                                   double target_nm, double lo = -0.02,
                                   double hi = 0.02, double tol_nm = 1.0);

} // namespace hbn::tuning

#include "hbnscreen/tuning.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace hbn::tuning {

namespace {

constexpr double kMaxStrain = 0.05;
constexpr double kIntervalFloor = 1e-6;

void check_strain(double s) {
  if (!(std::abs(s) <= kMaxStrain)) {
    std::ostringstream msg;
    msg << "strain " << s << " outside the supported range [-" << kMaxStrain
        << ", " << kMaxStrain << "]";
    throw std::invalid_argument(msg.str());
  }
}

CurveFit fit_degree(const std::vector<double>& s, const std::vector<double>& lam,
                    int degree) {
  const int n = static_cast<int>(s.size());
  MatrixX a(n, degree + 1);
  VectorX b(n);
  for (int i = 0; i < n; ++i) {
    double pow = 1.0;
    for (int j = 0; j <= degree; ++j) {
      a(i, j) = pow;
      pow *= s[i];
    }
    b(i) = lam[i];
  }
  CurveFit fit;
  fit.degree = degree;
  fit.coeffs = a.colPivHouseholderQr().solve(b);
  fit.rms_residual = std::sqrt((a * fit.coeffs - b).squaredNorm() / n);
  return fit;
}

} // namespace

std::vector<double> strain_grid(double lo, double hi, int points) {
  if (points < 2) throw std::invalid_argument("strain grid needs at least 2 points");
  if (!(lo < hi)) throw std::invalid_argument("strain grid needs lo < hi");
  check_strain(lo);
  check_strain(hi);
  std::vector<double> out(points);
  for (int i = 0; i < points; ++i)
    out[i] = lo + (hi - lo) * i / (points - 1);
  return out;
}

StrainCurve sweep(pipeline::Pipeline& pipe, const geometry::DefectSpec& spec,
                  const std::vector<double>& strains) {
  if (strains.empty()) throw std::invalid_argument("empty strain grid");
  for (double s : strains) check_strain(s);

  StrainCurve curve;
  curve.defect = spec.name;
  bool any = false;
  for (double s : strains) {
    auto analysis = pipe.analyze(spec, s);
    StrainSample sample;
    sample.strain = s;
    sample.type = analysis.transition.type;
    if (analysis.transition.exists) {
      sample.has_transition = true;
      sample.energy_ev = analysis.transition.energy_ev;
      sample.wavelength_nm = analysis.transition.wavelength_nm;
      any = true;
    }
    curve.samples.push_back(sample);
  }
  if (!any)
    throw std::runtime_error("defect " + spec.name +
                             " has no transition anywhere on the strain grid");
  return curve;
}

double CurveFit::eval(double s) const {
  double acc = 0.0;
  double pow = 1.0;
  for (int j = 0; j < coeffs.size(); ++j) {
    acc += coeffs(j) * pow;
    pow *= s;
  }
  return acc;
}

CurveFit fit_curve(const StrainCurve& curve) {
  std::vector<double> s;
  std::vector<double> lam;
  for (const auto& sample : curve.samples) {
    if (!sample.has_transition) continue;
    s.push_back(sample.strain);
    lam.push_back(sample.wavelength_nm);
  }
  if (s.size() < 3)
    throw std::invalid_argument("curve fit needs at least 3 samples with a transition");

  auto linear = fit_degree(s, lam, 1);
  double scale = 0.0;
  for (double v : lam) scale = std::max(scale, std::abs(v));
  // An already-exact line never upgrades: residual at machine noise.
  if (linear.rms_residual <= 1e-9 * (1.0 + scale)) return linear;

  auto quad = fit_degree(s, lam, 2);
  if (quad.rms_residual <= 0.8 * linear.rms_residual) return quad;
  return linear;
}

TuneResult solve_strain_for_target(const WavelengthFn& fn, double target_nm,
                                   double lo, double hi, double tol_nm) {
  if (!(lo < hi)) throw std::invalid_argument("strain bracket needs lo < hi");
  check_strain(lo);
  check_strain(hi);
  if (!(target_nm > 0.0)) throw std::invalid_argument("target wavelength must be positive");
  if (tol_nm < 0.0) throw std::invalid_argument("tolerance must be non-negative");

  TuneResult res;
  auto eval = [&](double s) -> double {
    auto lam = fn(s);
    if (!lam) {
      std::ostringstream msg;
      msg << "transition disappears at strain " << s;
      throw std::runtime_error(msg.str());
    }
    res.trace.emplace_back(s, *lam);
    return *lam;
  };

  double flo = eval(lo) - target_nm;
  double fhi = eval(hi) - target_nm;
  double best_s = lo;
  double best_f = flo;
  if (std::abs(fhi) < std::abs(flo)) {
    best_s = hi;
    best_f = fhi;
  }

  if (std::abs(best_f) > tol_nm) {
    if (flo * fhi > 0.0) {
      std::ostringstream msg;
      msg << "target " << target_nm << " nm is outside the achievable range ["
          << std::min(flo, fhi) + target_nm << ", " << std::max(flo, fhi) + target_nm
          << "] nm on this strain bracket";
      throw std::runtime_error(msg.str());
    }
    while (hi - lo >= kIntervalFloor) {
      const double mid = 0.5 * (lo + hi);
      const double fmid = eval(mid) - target_nm;
      ++res.iterations;
      if (std::abs(fmid) < std::abs(best_f)) {
        best_s = mid;
        best_f = fmid;
      }
      if (std::abs(fmid) <= tol_nm) break;
      if (flo * fmid <= 0.0) {
        hi = mid;
        fhi = fmid;
      } else {
        lo = mid;
        flo = fmid;
      }
    }
  }

  res.strain = best_s;
  res.wavelength_nm = best_f + target_nm;
  res.energy_ev = kEvNm / res.wavelength_nm;
  return res;
}

TuneResult solve_strain_for_target(pipeline::Pipeline& pipe,
                                   const geometry::DefectSpec& spec,
                                   double target_nm, double lo, double hi,
                                   double tol_nm) {
  WavelengthFn fn = [&](double s) -> std::optional<double> {
    auto analysis = pipe.analyze(spec, s);
    if (!analysis.transition.exists) return std::nullopt;
    return analysis.transition.wavelength_nm;
  };
  return solve_strain_for_target(fn, target_nm, lo, hi, tol_nm);
}

} // namespace hbn::tuning

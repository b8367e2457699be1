#include "hbnscreen/pipeline.hpp"

#include <cmath>
#include <utility>

#include "hbnscreen/kspace.hpp"

namespace hbn::pipeline {

namespace {

long long strain_key(double s) { return std::llround(s * 1e12); }

} // namespace

Pipeline::Pipeline(electronic::TBParams params, Options opt)
    : params_(std::move(params)), opt_(opt) {}

geometry::Supercell Pipeline::pristine_cell(double strain) const {
  auto cell = geometry::build_supercell(geometry::LatticeSpec::hexagonal(opt_.a0),
                                        opt_.n1, opt_.n2, params_.species);
  if (strain != 0.0) cell = geometry::apply_biaxial_strain(cell, strain);
  return cell;
}

geometry::Supercell Pipeline::defect_cell(const geometry::DefectSpec& spec,
                                          double strain) const {
  auto cell = geometry::build_supercell(geometry::LatticeSpec::hexagonal(opt_.a0),
                                        opt_.n1, opt_.n2, params_.species);
  cell = geometry::apply_defect(cell, spec, params_.species);
  if (strain != 0.0) cell = geometry::apply_biaxial_strain(cell, strain);
  return cell;
}

electronic::TBParams Pipeline::params_for(const std::string& defect_name) const {
  if (calibration_path_.empty()) return params_;
  auto overrides = electronic::load_calibration(calibration_path_, defect_name);
  return electronic::with_overrides(params_, overrides);
}

const PristineReference& Pipeline::pristine(double strain) {
  const long long key = strain_key(strain);
  auto it = cache_.find(key);
  if (it != cache_.end()) return it->second;

  PristineReference ref;
  ref.cell = pristine_cell(strain);
  auto scf_grid = kspace::monkhorst_pack(opt_.scf_n1, opt_.scf_n2);
  auto scf = electronic::scf_solve(ref.cell, params_, scf_grid, opt_.scf);
  ref.mf = scf.mean_field;
  auto dense_grid = kspace::gamma_centered(opt_.dense_n1, opt_.dense_n2);
  ref.dense = electronic::solve_frozen(ref.cell, params_, ref.mf, dense_grid);
  ref.gap = classify::find_gap(ref.dense, opt_.n1, opt_.n2);
  auto dipoles = spectra::dipole_elements(ref.dense, ref.cell);
  ref.eps2_scale = spectra::reference_scale(ref.dense, dipoles, opt_.sigma_ev,
                                            opt_.photon_step_ev);
  return cache_.emplace(key, std::move(ref)).first->second;
}

DefectAnalysis Pipeline::analyze(const geometry::DefectSpec& spec, double strain) {
  return analyze_with(spec, params_for(spec.name), strain);
}

DefectAnalysis Pipeline::analyze_with(const geometry::DefectSpec& spec,
                                      const electronic::TBParams& params,
                                      double strain) {
  DefectAnalysis out;
  out.spec = spec;
  out.strain = strain;
  out.cell = defect_cell(spec, strain);

  auto scf_grid = kspace::monkhorst_pack(opt_.scf_n1, opt_.scf_n2);
  auto scf = electronic::scf_solve(out.cell, params, scf_grid, opt_.scf);
  out.mf = scf.mean_field;
  auto dense_grid = kspace::gamma_centered(opt_.dense_n1, opt_.dense_n2);
  out.dense = electronic::solve_frozen(out.cell, params, out.mf, dense_grid);

  const auto& ref = pristine(strain);
  out.pristine_gap = ref.gap;
  out.levels = classify::extract_defect_levels(out.dense, ref.gap, opt_.levels);

  auto dipoles = spectra::dipole_elements(out.dense, out.cell);
  auto grid = spectra::uniform_grid(opt_.photon_min_ev, opt_.photon_max_ev,
                                    opt_.photon_step_ev);
  const double floor = opt_.peak_floor_rel * ref.eps2_scale;
  out.spectrum = spectra::epsilon2(out.dense, dipoles, grid, opt_.sigma_ev, floor);

  out.transition = classify::first_order_transition(out.levels, out.spectrum,
                                                    ref.gap, spec.name, spec.charge);
  return out;
}

} // namespace hbn::pipeline

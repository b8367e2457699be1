#pragma once

#include <map>
#include <string>
#include <vector>

#include "hbnscreen/classify.hpp"
#include "hbnscreen/electronic.hpp"
#include "hbnscreen/geometry.hpp"
#include "hbnscreen/spectra.hpp"

namespace hbn::pipeline {

struct Options {
  int n1 = 7;
  int n2 = 7;
  double a0 = 2.504;
  int scf_n1 = 5; // Monkhorst-Pack mesh for the self-consistent run
  int scf_n2 = 5;
  int dense_n1 = 11; // zone-centered mesh for analysis
  int dense_n2 = 11;
  double sigma_ev = 0.05;
  double photon_min_ev = 0.0;
  double photon_max_ev = 6.5;
  double photon_step_ev = 0.01;
  double peak_floor_rel = 1e-3; // of the pristine reference scale
  classify::LevelOptions levels;
  electronic::ScfOptions scf;
};

struct PristineReference {
  geometry::Supercell cell;
  electronic::MeanFieldState mf;
  electronic::EigenSolution dense;
  classify::BandGap gap;
  double eps2_scale = 0.0;
};

struct DefectAnalysis {
  geometry::DefectSpec spec;
  double strain = 0.0;
  geometry::Supercell cell;
  electronic::MeanFieldState mf;
  electronic::EigenSolution dense;
  classify::BandGap pristine_gap;
  std::vector<classify::DefectLevel> levels;
  spectra::Spectrum spectrum;
  classify::Transition transition;
};

// Runs the full chain per defect: supercell, edits, strain, SCF on the
// coarse mesh, frozen dense solve, level extraction against the pristine
// edges, zone-center absorption, first transition. Pristine references are
// cached per strain value.
class Pipeline {
 public:
  explicit Pipeline(electronic::TBParams params, Options opt = {});

  // Onsite calibration looked up per defect name at analyze time.
  void set_calibration_file(const std::string& path) { calibration_path_ = path; }

  const PristineReference& pristine(double strain = 0.0);
  DefectAnalysis analyze(const geometry::DefectSpec& spec, double strain = 0.0);

  // Same chain under explicit parameters (the pristine reference keeps the
  // pipeline's own); lets a calibration loop vary one onsite cheaply.
  DefectAnalysis analyze_with(const geometry::DefectSpec& spec,
                              const electronic::TBParams& params, double strain);

  geometry::Supercell pristine_cell(double strain = 0.0) const;
  geometry::Supercell defect_cell(const geometry::DefectSpec& spec,
                                  double strain = 0.0) const;

  // Parameters after calibration overrides for one defect.
  electronic::TBParams params_for(const std::string& defect_name) const;

  const Options& options() const { return opt_; }
  const electronic::TBParams& params() const { return params_; }

 private:
  electronic::TBParams params_;
  Options opt_;
  std::string calibration_path_;
  std::map<long long, PristineReference> cache_;
};

} // namespace hbn::pipeline

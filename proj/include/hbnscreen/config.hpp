#pragma once

#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "hbnscreen/pipeline.hpp"

namespace hbn::config {

// Every knob the command line exposes, with the defaults used throughout.
// Values travel as flat key=value pairs so a run can be replayed from the
// header of any output file.
struct RunConfig {
  std::string params = "data/tbparams.txt";
  std::string calibration = "data/calibration.txt";
  std::string defects = "data/defects.txt";
  std::string dataset = "data/table1.csv";

  double a0 = 2.504;
  int n1 = 7;
  int n2 = 7;
  int scf_n1 = 5;
  int scf_n2 = 5;
  int dense_n1 = 11;
  int dense_n2 = 11;

  double scf_tol_ev = 1e-4;
  int scf_max_iter = 500;
  double scf_mixing = 0.3;
  double seed_field_ev = 0.1;

  double sigma_ev = 0.05;
  double photon_min_ev = 0.0;
  double photon_max_ev = 6.5;
  double photon_step_ev = 0.01;
  double peak_floor_rel = 1e-3;

  double degeneracy_tol_ev = 1e-3;
  double edge_margin_ev = 0.5;
  double flat_tol_ev = 0.1;

  double strain_lo = -0.02;
  double strain_hi = 0.02;
  int sweep_points = 9;
  double tune_tol_nm = 1.0;

  double match_tol_nm = 25.0;
  int path_points = 40;

  double fit_gap_ev = 5.99;
  double fit_bandwidth_ev = 5.0;

  // Assigns one field by key, parsing the value. Unknown keys and
  // malformed numbers throw std::invalid_argument.
  void set(const std::string& key, const std::string& value);
  std::string get(const std::string& key) const;

  // All keys and their current values, in a fixed order.
  std::vector<std::pair<std::string, std::string>> items() const;

  // key=value lines, '#' comments. Applied over the current values.
  void apply_file(const std::string& path);
  static RunConfig from_file(const std::string& path);
  void save(const std::string& path) const;

  pipeline::Options pipeline_options() const;
};

// Shortest decimal form that parses back to exactly the same double.
std::string format_double(double v);

// Commented header identifying the build, the command, and every setting,
// so any output file doubles as a record of how it was produced.
void write_snapshot(std::ostream& os, const RunConfig& cfg,
                    const std::string& command);

} // namespace hbn::config

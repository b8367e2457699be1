#pragma once

#include <string>
#include <vector>

#include "hbnscreen/types.hpp"

namespace hbn::catalog {

// Energy <-> wavelength via hc = 1239.84193 eV nm; non-positive input throws.
double ev_to_nm(double ev);
double nm_to_ev(double nm);

struct DefectRecord {
  std::string name;
  int charge = 0;
  double transition_ev = 0.0;
  double wavelength_nm = 0.0;
  std::string type;        // radiative | non-radiative | degenerate
  std::string deformation; // in-plane | out-of-plane
  std::string footnote;    // "", "*", "**"
};

// CSV with header name,charge,transition_ev,wavelength_nm,type,deformation,
// footnote. Rejects rows whose wavelength disagrees with hc/E by more than
// 1.0 nm and duplicate (name, charge) keys, with row-numbered diagnostics.
std::vector<DefectRecord> parse_dataset(const std::string& csv_text);
std::vector<DefectRecord> load_dataset(const std::string& path);

struct Target {
  double wavelength_nm = 0.0;
  std::string label;
  std::string category;
};

// The quantum-technology wavelengths the screening aims at: color centers,
// alkali and rare-earth memories, telecom windows.
std::vector<Target> builtin_targets();

struct Match {
  DefectRecord record;
  double delta_nm = 0.0; // record wavelength minus target wavelength
};

struct TargetMatches {
  Target target;
  std::vector<Match> candidates; // |delta| ascending, ties by name then charge
};

// Every record within the tolerance of each target. Candidate order does not
// depend on the order of the input records.
std::vector<TargetMatches> match_targets(const std::vector<DefectRecord>& records,
                                         const std::vector<Target>& targets,
                                         double tolerance_nm);

} // namespace hbn::catalog

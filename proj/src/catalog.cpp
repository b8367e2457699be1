#include "hbnscreen/catalog.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

namespace hbn::catalog {

namespace {

[[noreturn]] void fail(const std::string& msg) {
  throw std::invalid_argument(msg);
}

std::string trim(const std::string& s) {
  size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::stringstream ss(line);
  while (std::getline(ss, field, ',')) out.push_back(trim(field));
  if (!line.empty() && line.back() == ',') out.push_back("");
  return out;
}

constexpr const char* kHeader =
    "name,charge,transition_ev,wavelength_nm,type,deformation,footnote";

} // namespace

double ev_to_nm(double ev) {
  if (!(ev > 0)) fail("photon energy must be positive");
  return kEvNm / ev;
}

double nm_to_ev(double nm) {
  if (!(nm > 0)) fail("wavelength must be positive");
  return kEvNm / nm;
}

std::vector<DefectRecord> parse_dataset(const std::string& csv_text) {
  std::istringstream ss(csv_text);
  std::string line;
  int row = 0;
  bool saw_header = false;
  std::vector<DefectRecord> records;
  std::set<std::pair<std::string, int>> keys;

  while (std::getline(ss, line)) {
    ++row;
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    if (!saw_header) {
      if (line != kHeader)
        fail("row 1: dataset header must be '" + std::string(kHeader) + "'");
      saw_header = true;
      continue;
    }
    std::vector<std::string> f = split_csv(line);
    if (f.size() != 7)
      fail("row " + std::to_string(row) + ": expected 7 fields, got " +
           std::to_string(f.size()));
    DefectRecord r;
    r.name = f[0];
    if (r.name.empty()) fail("row " + std::to_string(row) + ": empty defect name");
    try {
      size_t used = 0;
      r.charge = std::stoi(f[1], &used);
      if (used != f[1].size()) throw std::runtime_error("junk");
      r.transition_ev = std::stod(f[2], &used);
      if (used != f[2].size()) throw std::runtime_error("junk");
      r.wavelength_nm = std::stod(f[3], &used);
      if (used != f[3].size()) throw std::runtime_error("junk");
    } catch (const std::exception&) {
      fail("row " + std::to_string(row) + ": malformed numeric field");
    }
    r.type = f[4];
    r.deformation = f[5];
    r.footnote = f[6];

    if (!(r.transition_ev > 0))
      fail("row " + std::to_string(row) + ": transition energy must be positive");
    if (!(r.wavelength_nm > 0))
      fail("row " + std::to_string(row) + ": wavelength must be positive");
    const double implied = ev_to_nm(r.transition_ev);
    if (std::abs(implied - r.wavelength_nm) > 1.0) {
      std::ostringstream msg;
      msg.precision(6);
      msg << "row " << row << ": wavelength " << r.wavelength_nm
          << " nm disagrees with hc/E = " << implied << " nm by more than 1.0 nm";
      fail(msg.str());
    }
    if (!keys.insert({r.name, r.charge}).second)
      fail("row " + std::to_string(row) + ": duplicate record for " + r.name +
           " at charge " + std::to_string(r.charge));
    records.push_back(std::move(r));
  }
  if (!saw_header) fail("dataset is empty");
  return records;
}

std::vector<DefectRecord> load_dataset(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail("cannot open dataset '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_dataset(buf.str());
}

std::vector<Target> builtin_targets() {
  return {
      {552.0, "PbV- (diamond)", "solid-state qubit"},
      {589.0, "Na-D2", "alkali memory"},
      {590.0, "Na-D1", "alkali memory"},
      {602.0, "GeV- (diamond)", "solid-state qubit"},
      {606.0, "Pr3+:Y2SiO5", "rare-earth memory"},
      {620.0, "SnV- (diamond)", "solid-state qubit"},
      {637.0, "NV- (diamond)", "solid-state qubit"},
      {738.0, "SiV- (diamond)", "solid-state qubit"},
      {780.0, "Rb-D2", "alkali memory"},
      {793.0, "Tm3+:Y2SiO5", "rare-earth memory"},
      {795.0, "Rb-D1", "alkali memory"},
      {850.0, "Telecom-1", "telecom band"},
      {852.0, "Cs-D2", "alkali memory"},
      {862.0, "VSi- (silicon carbide)", "solid-state qubit"},
      {894.0, "Cs-D1", "alkali memory"},
      {1330.0, "Telecom O-band", "telecom band"},
      {1550.0, "Telecom C-band", "telecom band"},
  };
}

std::vector<TargetMatches> match_targets(const std::vector<DefectRecord>& records,
                                         const std::vector<Target>& targets,
                                         double tolerance_nm) {
  if (!(tolerance_nm > 0)) fail("matching tolerance must be positive");
  std::vector<TargetMatches> out;
  out.reserve(targets.size());
  for (const Target& t : targets) {
    TargetMatches tm;
    tm.target = t;
    for (const DefectRecord& r : records) {
      const double delta = r.wavelength_nm - t.wavelength_nm;
      if (std::abs(delta) <= tolerance_nm) tm.candidates.push_back({r, delta});
    }
    std::sort(tm.candidates.begin(), tm.candidates.end(),
              [](const Match& a, const Match& b) {
                const double da = std::abs(a.delta_nm);
                const double db = std::abs(b.delta_nm);
                if (da != db) return da < db;
                if (a.record.name != b.record.name) return a.record.name < b.record.name;
                return a.record.charge < b.record.charge;
              });
    out.push_back(std::move(tm));
  }
  return out;
}

} // namespace hbn::catalog

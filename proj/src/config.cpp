#include "hbnscreen/config.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <variant>

#include "hbnscreen/types.hpp"

namespace hbn::config {

namespace {

using Member =
    std::variant<std::string RunConfig::*, int RunConfig::*, double RunConfig::*>;

struct FieldDef {
  const char* key;
  Member ptr;
};

const std::vector<FieldDef>& fields() {
  static const std::vector<FieldDef> defs = {
      {"params", &RunConfig::params},
      {"calibration", &RunConfig::calibration},
      {"defects", &RunConfig::defects},
      {"dataset", &RunConfig::dataset},
      {"a0", &RunConfig::a0},
      {"n1", &RunConfig::n1},
      {"n2", &RunConfig::n2},
      {"scf_n1", &RunConfig::scf_n1},
      {"scf_n2", &RunConfig::scf_n2},
      {"dense_n1", &RunConfig::dense_n1},
      {"dense_n2", &RunConfig::dense_n2},
      {"scf_tol_ev", &RunConfig::scf_tol_ev},
      {"scf_max_iter", &RunConfig::scf_max_iter},
      {"scf_mixing", &RunConfig::scf_mixing},
      {"seed_field_ev", &RunConfig::seed_field_ev},
      {"sigma_ev", &RunConfig::sigma_ev},
      {"photon_min_ev", &RunConfig::photon_min_ev},
      {"photon_max_ev", &RunConfig::photon_max_ev},
      {"photon_step_ev", &RunConfig::photon_step_ev},
      {"peak_floor_rel", &RunConfig::peak_floor_rel},
      {"degeneracy_tol_ev", &RunConfig::degeneracy_tol_ev},
      {"edge_margin_ev", &RunConfig::edge_margin_ev},
      {"flat_tol_ev", &RunConfig::flat_tol_ev},
      {"strain_lo", &RunConfig::strain_lo},
      {"strain_hi", &RunConfig::strain_hi},
      {"sweep_points", &RunConfig::sweep_points},
      {"tune_tol_nm", &RunConfig::tune_tol_nm},
      {"match_tol_nm", &RunConfig::match_tol_nm},
      {"path_points", &RunConfig::path_points},
      {"fit_gap_ev", &RunConfig::fit_gap_ev},
      {"fit_bandwidth_ev", &RunConfig::fit_bandwidth_ev},
  };
  return defs;
}

const FieldDef& find_field(const std::string& key) {
  for (const auto& def : fields())
    if (key == def.key) return def;
  throw std::invalid_argument("unknown config key: " + key);
}

int parse_int(const std::string& text, const std::string& key) {
  try {
    size_t used = 0;
    const int v = std::stoi(text, &used);
    if (used != text.size()) throw std::invalid_argument("");
    return v;
  } catch (const std::exception&) {
    throw std::invalid_argument("config key " + key + ": not an integer: " + text);
  }
}

double parse_real(const std::string& text, const std::string& key) {
  try {
    size_t used = 0;
    const double v = std::stod(text, &used);
    if (used != text.size()) throw std::invalid_argument("");
    return v;
  } catch (const std::exception&) {
    throw std::invalid_argument("config key " + key + ": not a number: " + text);
  }
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

} // namespace

std::string format_double(double v) {
  for (int prec = 1; prec <= 17; ++prec) {
    std::ostringstream os;
    os.precision(prec);
    os << v;
    if (std::stod(os.str()) == v) return os.str();
  }
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

void RunConfig::set(const std::string& key, const std::string& value) {
  const auto& def = find_field(key);
  if (std::holds_alternative<std::string RunConfig::*>(def.ptr)) {
    this->*std::get<std::string RunConfig::*>(def.ptr) = value;
  } else if (std::holds_alternative<int RunConfig::*>(def.ptr)) {
    this->*std::get<int RunConfig::*>(def.ptr) = parse_int(value, key);
  } else {
    this->*std::get<double RunConfig::*>(def.ptr) = parse_real(value, key);
  }
}

std::string RunConfig::get(const std::string& key) const {
  const auto& def = find_field(key);
  if (std::holds_alternative<std::string RunConfig::*>(def.ptr))
    return this->*std::get<std::string RunConfig::*>(def.ptr);
  if (std::holds_alternative<int RunConfig::*>(def.ptr))
    return std::to_string(this->*std::get<int RunConfig::*>(def.ptr));
  return format_double(this->*std::get<double RunConfig::*>(def.ptr));
}

std::vector<std::pair<std::string, std::string>> RunConfig::items() const {
  std::vector<std::pair<std::string, std::string>> out;
  out.reserve(fields().size());
  for (const auto& def : fields()) out.emplace_back(def.key, get(def.key));
  return out;
}

void RunConfig::apply_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      std::ostringstream msg;
      msg << path << ":" << lineno << ": expected key=value";
      throw std::invalid_argument(msg.str());
    }
    set(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
}

RunConfig RunConfig::from_file(const std::string& path) {
  RunConfig cfg;
  cfg.apply_file(path);
  return cfg;
}

void RunConfig::save(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write config file: " + path);
  for (const auto& [key, value] : items()) out << key << " = " << value << "\n";
}

pipeline::Options RunConfig::pipeline_options() const {
  pipeline::Options o;
  o.n1 = n1;
  o.n2 = n2;
  o.a0 = a0;
  o.scf_n1 = scf_n1;
  o.scf_n2 = scf_n2;
  o.dense_n1 = dense_n1;
  o.dense_n2 = dense_n2;
  o.sigma_ev = sigma_ev;
  o.photon_min_ev = photon_min_ev;
  o.photon_max_ev = photon_max_ev;
  o.photon_step_ev = photon_step_ev;
  o.peak_floor_rel = peak_floor_rel;
  o.levels.degeneracy_tol_ev = degeneracy_tol_ev;
  o.levels.edge_margin_ev = edge_margin_ev;
  o.levels.flat_tol_ev = flat_tol_ev;
  o.scf.tol_ev = scf_tol_ev;
  o.scf.max_iter = scf_max_iter;
  o.scf.mixing = scf_mixing;
  o.scf.seed_field_ev = seed_field_ev;
  return o;
}

void write_snapshot(std::ostream& os, const RunConfig& cfg,
                    const std::string& command) {
  os << "# " << kVersion << "\n";
  os << "# command = " << command << "\n";
  for (const auto& [key, value] : cfg.items())
    os << "# " << key << " = " << value << "\n";
}

} // namespace hbn::config

#include "hbnscreen/geometry.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

namespace hbn::geometry {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kDistTol = 1e-9;   // angstrom, groups symmetry-equal distances
constexpr double kAngleTol = 1e-9;

[[noreturn]] void fail(const std::string& msg) {
  throw std::invalid_argument(msg);
}

// Sort key used for site ordinals: distance from the cell centroid, then
// polar angle in [0, 2pi), then site index. Distances and angles of
// symmetry-related sites agree only up to roundoff, hence the tolerances.
struct CentroidOrder {
  double dist;
  double angle;
  int index;

  bool operator<(const CentroidOrder& o) const {
    if (std::abs(dist - o.dist) > kDistTol) return dist < o.dist;
    if (std::abs(angle - o.angle) > kAngleTol) return angle < o.angle;
    return index < o.index;
  }
};

CentroidOrder centroid_order(const Supercell& cell, const Site& site) {
  Vec2 d = site.position - cell.centroid();
  double angle = std::atan2(d.y(), d.x());
  if (angle < 0) angle += 2.0 * kPi;
  return {d.norm(), angle, site.index};
}

// Pristine sites of one species, ordered so that ordinal k (1-based) is the
// k-th entry.
std::vector<int> species_ranking(const Supercell& cell, const std::string& species) {
  std::vector<std::pair<CentroidOrder, int>> ranked;
  for (const Site& s : cell.sites) {
    if (s.species == species) ranked.push_back({centroid_order(cell, s), s.index});
  }
  std::sort(ranked.begin(), ranked.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  std::vector<int> out;
  out.reserve(ranked.size());
  for (const auto& r : ranked) out.push_back(r.second);
  return out;
}

struct ParsedLabel {
  std::string species;
  int ordinal; // 1-based
};

ParsedLabel parse_label(const std::string& label) {
  size_t pos = 0;
  while (pos < label.size() && std::isalpha(static_cast<unsigned char>(label[pos]))) ++pos;
  if (pos == 0) fail("malformed site label '" + label + "'");
  std::string species = label.substr(0, pos);
  int ordinal = 1;
  if (pos < label.size()) {
    for (size_t q = pos; q < label.size(); ++q) {
      if (!std::isdigit(static_cast<unsigned char>(label[q])))
        fail("malformed site label '" + label + "'");
    }
    ordinal = std::stoi(label.substr(pos));
    if (ordinal < 1) fail("site ordinal must be >= 1 in '" + label + "'");
  }
  return {species, ordinal};
}

// Working state while replaying an edit list.
struct EditState {
  std::vector<Site> sites;           // evolving copy
  const Supercell* pristine;
  double d0_eff;                     // strained nearest-neighbor distance

  bool adjacent(int a, int b) const {
    double d = (sites[a].position - sites[b].position).norm();
    return std::abs(d - d0_eff) < 1e-6 * (1.0 + d0_eff);
  }
};

// Ordinal of `site_index` among pristine sites of its own species.
int ordinal_of(const Supercell& pristine, int site_index) {
  std::vector<int> ranking = species_ranking(pristine, pristine.sites[site_index].species);
  for (size_t k = 0; k < ranking.size(); ++k)
    if (ranking[k] == site_index) return int(k) + 1;
  return -1;
}

std::pair<int, int> resolve_cluster(const EditState& st, const std::string& cluster_label) {
  const Supercell& cell = *st.pristine;
  if (cluster_label == "auto") {
    // Canonical bi-vacancy: adjacent vacant pair whose midpoint is closest to
    // the cell centroid.
    int best_a = -1, best_b = -1;
    CentroidOrder best{0, 0, 0};
    for (size_t a = 0; a < st.sites.size(); ++a) {
      if (!st.sites[a].vacant()) continue;
      for (size_t b = a + 1; b < st.sites.size(); ++b) {
        if (!st.sites[b].vacant()) continue;
        if (!st.adjacent(int(a), int(b))) continue;
        Site mid;
        mid.index = int(a) * int(st.sites.size()) + int(b);
        mid.position = 0.5 * (st.sites[a].position + st.sites[b].position);
        CentroidOrder key = centroid_order(cell, mid);
        if (best_a < 0 || key < best) {
          best = key;
          best_a = int(a);
          best_b = int(b);
        }
      }
    }
    if (best_a < 0) fail("interstitial 'auto': no adjacent bi-vacancy in the cell");
    return {best_a, best_b};
  }
  size_t plus = cluster_label.find('+');
  if (plus == std::string::npos)
    fail("interstitial cluster '" + cluster_label + "' must be 'auto' or 'L1+L2'");
  int a = resolve_site_label(cell, cluster_label.substr(0, plus));
  int b = resolve_site_label(cell, cluster_label.substr(plus + 1));
  if (a == b) fail("interstitial cluster names the same site twice");
  if (!st.sites[a].vacant() || !st.sites[b].vacant())
    fail("interstitial cluster sites must both be vacant");
  if (!st.adjacent(a, b))
    fail("interstitial cluster sites are not nearest neighbors");
  return {a, b};
}

std::string trim(const std::string& s) {
  size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) out.push_back(item);
  return out;
}

} // namespace

int SpeciesTable::pi_of(const std::string& species) const {
  auto it = pi_electrons.find(species);
  if (it == pi_electrons.end())
    throw std::invalid_argument("unknown species '" + species + "'");
  return it->second;
}

SpeciesTable default_species_table() {
  // Effective counts for the single-orbital model, not free-atom valences:
  // each dopant's entry is chosen so the filling of its gap level matches its
  // observed character. Chalcogens act as empty deep-level centers, so they
  // contribute no pi electrons; the donor picture they would carry in a full
  // valence treatment lives in the sigma system this model does not resolve.
  SpeciesTable t;
  t.pi_electrons = {
      {"B", 0},  {"N", 2},  {"C", 1},
      {"Al", 0}, {"Ga", 0}, {"In", 0},
      {"Si", 1}, {"Ge", 1}, {"Sn", 1},
      {"P", 2},  {"As", 2}, {"Sb", 2},
      {"O", 0},  {"S", 0},  {"Se", 0},
      {"Ti", 2}, {"Va", 3}, {"Er", 1},
  };
  return t;
}

LatticeSpec LatticeSpec::hexagonal(double a0) {
  if (!(a0 > 0)) throw std::invalid_argument("lattice constant must be positive");
  LatticeSpec spec;
  spec.a0 = a0;
  spec.v1 = a0 * Vec2(1.0, 0.0);
  spec.v2 = a0 * Vec2(-0.5, std::sqrt(3.0) / 2.0);
  return spec;
}

int Supercell::orbital_count() const {
  int n = 0;
  for (const Site& s : sites)
    if (!s.vacant()) ++n;
  return n;
}

int Supercell::total_electrons() const {
  int n = 0;
  for (const Site& s : sites) n += s.pi_electrons;
  if (defect) n -= defect->charge;
  return n;
}

Supercell build_supercell(const LatticeSpec& lattice, int n1, int n2,
                          const SpeciesTable& table) {
  if (n1 < 1 || n2 < 1) fail("supercell multiplicities must be >= 1");
  if (!(lattice.a0 > 0)) fail("lattice constant must be positive");

  Supercell cell;
  cell.lattice = lattice;
  cell.n1 = n1;
  cell.n2 = n2;
  cell.sites.reserve(size_t(2) * n1 * n2);

  const Vec2 tau = (lattice.v1 + 2.0 * lattice.v2) / 3.0; // N offset inside the cell
  const int pi_b = table.pi_of("B");
  const int pi_n = table.pi_of("N");
  for (int i = 0; i < n1; ++i) {
    for (int j = 0; j < n2; ++j) {
      Vec2 origin = double(i) * lattice.v1 + double(j) * lattice.v2;
      Site b;
      b.index = int(cell.sites.size());
      b.species = "B";
      b.position = origin;
      b.pi_electrons = pi_b;
      cell.sites.push_back(b);
      Site n;
      n.index = int(cell.sites.size());
      n.species = "N";
      n.position = origin + tau;
      n.pi_electrons = pi_n;
      cell.sites.push_back(n);
    }
  }
  return cell;
}

int resolve_site_label(const Supercell& cell, const std::string& label) {
  ParsedLabel p = parse_label(trim(label));
  std::vector<int> ranking = species_ranking(cell, p.species);
  if (ranking.empty()) fail("no sites of species '" + p.species + "' in the cell");
  if (size_t(p.ordinal) > ranking.size())
    fail("site label '" + label + "' exceeds the " + std::to_string(ranking.size()) +
         " sites of that species");
  return ranking[size_t(p.ordinal) - 1];
}

Supercell apply_defect(const Supercell& pristine, const DefectSpec& spec,
                       const SpeciesTable& table) {
  if (pristine.defect) fail("cell already carries a defect");
  if (spec.charge < -1 || spec.charge > 1) fail("charge must be -1, 0 or +1");
  if (spec.edits.empty()) fail("defect spec has no edits");

  Supercell cell = pristine;
  EditState st{cell.sites, &pristine,
               (1.0 + pristine.strain) * pristine.lattice.a0 / std::sqrt(3.0)};

  std::set<int> touched;
  auto claim = [&](int idx, const std::string& what) {
    if (!touched.insert(idx).second)
      fail("conflicting edits: site " + std::to_string(idx) + " already edited (" + what + ")");
    cell.edited_sites.push_back(idx);
  };

  for (const DefectEdit& edit : spec.edits) {
    if (const auto* sub = std::get_if<SubstitutionEdit>(&edit)) {
      int idx = resolve_site_label(pristine, sub->site_label);
      claim(idx, sub->site_label);
      if (!table.has(sub->new_species)) fail("unknown species '" + sub->new_species + "'");
      st.sites[idx].species = sub->new_species;
      st.sites[idx].pi_electrons = table.pi_of(sub->new_species);
    } else if (const auto* vac = std::get_if<VacancyEdit>(&edit)) {
      int idx = resolve_site_label(pristine, vac->site_label);
      if (st.sites[idx].vacant())
        fail("site '" + vac->site_label + "' is already vacant");
      claim(idx, vac->site_label);
      st.sites[idx].species = kVacantSpecies;
      st.sites[idx].pi_electrons = 0;
    } else if (const auto* ins = std::get_if<InterstitialEdit>(&edit)) {
      if (!table.has(ins->species)) fail("unknown species '" + ins->species + "'");
      auto [a, b] = resolve_cluster(st, ins->cluster_label);
      Site extra;
      extra.index = int(st.sites.size());
      extra.species = ins->species;
      extra.position = 0.5 * (st.sites[a].position + st.sites[b].position);
      extra.pi_electrons = table.pi_of(ins->species);
      cell.edited_sites.push_back(extra.index);
      st.sites.push_back(extra);
    }
  }

  cell.sites = std::move(st.sites);
  cell.defect = spec;
  return cell;
}

Supercell apply_biaxial_strain(const Supercell& cell, double s) {
  if (!(s > -1.0)) fail("biaxial strain must satisfy s > -1");
  Supercell out = cell;
  const double scale = 1.0 + s;
  for (Site& site : out.sites) site.position *= scale;
  out.strain = cell.strain + s + cell.strain * s; // (1+s_old)(1+s) - 1
  return out;
}

std::string canonical_name(const Supercell& pristine_cell, const DefectSpec& spec) {
  // Token per edit, then check whether nearest-to-center placement of the
  // ordinal-free tokens reproduces exactly this edit set; if so the plain
  // name is already unambiguous.
  struct Token {
    std::string plain;
    std::string qualified;
  };
  std::vector<Token> tokens;
  std::vector<int> targets; // site index per sub/vac edit, -1 for interstitial

  EditState st{pristine_cell.sites, &pristine_cell,
               (1.0 + pristine_cell.strain) * pristine_cell.lattice.a0 / std::sqrt(3.0)};

  for (const DefectEdit& edit : spec.edits) {
    if (const auto* sub = std::get_if<SubstitutionEdit>(&edit)) {
      int idx = resolve_site_label(pristine_cell, sub->site_label);
      int ord = ordinal_of(pristine_cell, idx);
      std::string host = pristine_cell.sites[idx].species;
      tokens.push_back({sub->new_species + host,
                        sub->new_species + host + std::to_string(ord)});
      targets.push_back(idx);
      st.sites[idx].species = sub->new_species;
    } else if (const auto* vac = std::get_if<VacancyEdit>(&edit)) {
      int idx = resolve_site_label(pristine_cell, vac->site_label);
      int ord = ordinal_of(pristine_cell, idx);
      std::string host = pristine_cell.sites[idx].species;
      tokens.push_back({std::string(kVacantSpecies) + host,
                        std::string(kVacantSpecies) + host + std::to_string(ord)});
      targets.push_back(idx);
      st.sites[idx].species = kVacantSpecies;
    } else if (const auto* ins = std::get_if<InterstitialEdit>(&edit)) {
      auto [a, b] = resolve_cluster(st, ins->cluster_label);
      (void)a;
      (void)b;
      tokens.push_back({ins->species, ins->species});
      targets.push_back(-1);
    }
  }

  // Replay with canonical placement: each sub/vac token claims the
  // lowest-ordinal unclaimed site of its host species.
  bool canonical = true;
  {
    std::set<int> claimed;
    size_t t = 0;
    for (const DefectEdit& edit : spec.edits) {
      std::string host;
      if (const auto* sub = std::get_if<SubstitutionEdit>(&edit))
        host = parse_label(sub->site_label).species;
      else if (const auto* vac = std::get_if<VacancyEdit>(&edit))
        host = parse_label(vac->site_label).species;
      else {
        ++t;
        continue; // interstitial placement is a function of the vacancies
      }
      std::vector<int> ranking = species_ranking(pristine_cell, host);
      int pick = -1;
      for (int idx : ranking) {
        if (!claimed.count(idx)) {
          pick = idx;
          break;
        }
      }
      if (pick != targets[t]) {
        canonical = false;
        break;
      }
      claimed.insert(pick);
      ++t;
    }
  }

  std::string name;
  for (size_t t = 0; t < tokens.size(); ++t) {
    if (t) name += '-';
    name += canonical ? tokens[t].plain : tokens[t].qualified;
  }
  return name;
}

std::vector<int> NeighborList::coordination(int n_sites) const {
  std::vector<int> z(size_t(n_sites), 0);
  for (const Bond& b : bonds) ++z[size_t(b.i)];
  return z;
}

NeighborList neighbor_list(const Supercell& cell, double cutoff) {
  if (!(cutoff > 0)) fail("neighbor cutoff must be positive");
  NeighborList list;
  list.cutoff = cutoff;

  const Vec2 A1 = cell.a1();
  const Vec2 A2 = cell.a2();
  const double area = std::abs(A1.x() * A2.y() - A1.y() * A2.x());
  const int M1 = int(std::ceil(cutoff * A2.norm() / area)) + 1;
  const int M2 = int(std::ceil(cutoff * A1.norm() / area)) + 1;

  const int n = int(cell.sites.size());
  for (int i = 0; i < n; ++i) {
    if (cell.sites[i].vacant()) continue;
    for (int j = 0; j < n; ++j) {
      if (cell.sites[j].vacant()) continue;
      for (int m1 = -M1; m1 <= M1; ++m1) {
        for (int m2 = -M2; m2 <= M2; ++m2) {
          if (i == j && m1 == 0 && m2 == 0) continue;
          Vec2 d = cell.sites[j].position + double(m1) * A1 + double(m2) * A2 -
                   cell.sites[i].position;
          double dist = d.norm();
          if (dist <= cutoff) list.bonds.push_back({i, j, m1, m2, dist});
        }
      }
    }
  }
  return list;
}

DefectSpec parse_defect_line(const std::string& line) {
  std::istringstream ss(line);
  DefectSpec spec;
  std::string charge_tok, edits_tok;
  if (!(ss >> spec.name >> charge_tok >> edits_tok))
    fail("defect line needs NAME CHARGE EDITS: '" + line + "'");
  std::string rest;
  if (ss >> rest) fail("trailing tokens in defect line: '" + line + "'");

  try {
    size_t used = 0;
    spec.charge = std::stoi(charge_tok, &used);
    if (used != charge_tok.size()) throw std::invalid_argument(charge_tok);
  } catch (const std::exception&) {
    fail("bad charge '" + charge_tok + "' in defect line");
  }
  if (spec.charge < -1 || spec.charge > 1) fail("charge must be -1, 0 or +1");

  for (const std::string& tok : split(edits_tok, ';')) {
    std::vector<std::string> f = split(tok, ':');
    if (f.empty()) fail("empty edit in '" + edits_tok + "'");
    if (f[0] == "sub") {
      if (f.size() != 3) fail("substitution needs sub:SITE:SPECIES, got '" + tok + "'");
      spec.edits.push_back(SubstitutionEdit{trim(f[1]), trim(f[2])});
    } else if (f[0] == "vac") {
      if (f.size() != 2) fail("vacancy needs vac:SITE, got '" + tok + "'");
      spec.edits.push_back(VacancyEdit{trim(f[1])});
    } else if (f[0] == "int") {
      if (f.size() != 3) fail("interstitial needs int:CLUSTER:SPECIES, got '" + tok + "'");
      spec.edits.push_back(InterstitialEdit{trim(f[1]), trim(f[2])});
    } else {
      fail("unknown edit verb '" + f[0] + "'");
    }
  }
  if (spec.edits.empty()) fail("defect line has no edits: '" + line + "'");
  return spec;
}

std::vector<DefectSpec> parse_defect_specs(const std::string& text) {
  std::vector<DefectSpec> specs;
  std::istringstream ss(text);
  std::string line;
  while (std::getline(ss, line)) {
    size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    specs.push_back(parse_defect_line(line));
  }
  return specs;
}

std::vector<DefectSpec> load_defect_specs(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail("cannot open defect spec file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_defect_specs(buf.str());
}

} // namespace hbn::geometry

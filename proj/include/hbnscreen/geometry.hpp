#pragma once

#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "hbnscreen/types.hpp"

namespace hbn::geometry {

// Species symbol marking a removed lattice site. Elemental vanadium uses "Va"
// so the single letter is unambiguous.
inline constexpr const char* kVacantSpecies = "V";

// Map from chemical symbol to the number of pi electrons the species donates
// to the p_z manifold. Doubles as the registry of known species.
struct SpeciesTable {
  std::map<std::string, int> pi_electrons;

  bool has(const std::string& species) const {
    return pi_electrons.count(species) > 0;
  }
  int pi_of(const std::string& species) const;
};

// Built-in donor counts for the species the screening study covers.
SpeciesTable default_species_table();

// Primitive hexagonal cell. v1 and v2 have equal length a0 and enclose 120
// degrees; the convention is fixed here once and everything downstream
// (neighbor shells, k-space paths) assumes it.
struct LatticeSpec {
  double a0 = 2.504; // angstrom
  Vec2 v1;
  Vec2 v2;

  static LatticeSpec hexagonal(double a0);
};

struct Site {
  int index = 0;
  std::string species;
  Vec2 position = Vec2::Zero(); // angstrom, strained coordinates
  int pi_electrons = 0;

  bool vacant() const { return species == kVacantSpecies; }
};

struct SubstitutionEdit {
  std::string site_label;  // e.g. "B1", "N3"; bare species means ordinal 1
  std::string new_species;
};

struct VacancyEdit {
  std::string site_label;
};

struct InterstitialEdit {
  std::string cluster_label; // "auto" or "B1+N1"
  std::string species;
};

using DefectEdit = std::variant<SubstitutionEdit, VacancyEdit, InterstitialEdit>;

struct DefectSpec {
  std::string name;
  int charge = 0; // -1, 0, +1
  std::vector<DefectEdit> edits;
};

// Relative elongation s = dL / L0 of every in-plane length.
struct StrainState {
  double s = 0.0;
};

struct Supercell {
  LatticeSpec lattice;   // unstrained primitive cell
  int n1 = 1;
  int n2 = 1;
  std::vector<Site> sites;
  double strain = 0.0;   // accumulated biaxial strain
  std::optional<DefectSpec> defect;
  std::vector<int> edited_sites; // site indices a defect touched (incl. interstitial)

  // Strained supercell translation vectors.
  Vec2 a1() const { return (1.0 + strain) * double(n1) * lattice.v1; }
  Vec2 a2() const { return (1.0 + strain) * double(n2) * lattice.v2; }

  // Geometric center of the strained cell parallelogram.
  Vec2 centroid() const { return 0.5 * (a1() + a2()); }

  int orbital_count() const; // non-vacant sites
  int total_electrons() const; // sum of site pi counts minus defect charge
};

// Lays out n1 x n2 copies of the two-atom basis (B at the cell origin, N at
// (v1 + 2 v2)/3), cell-major then basis-minor, so site 2*(i*n2 + j) is the B
// atom of cell (i, j).
Supercell build_supercell(const LatticeSpec& lattice, int n1, int n2,
                          const SpeciesTable& table = default_species_table());

// Resolves a site label ("B", "B2", "N14") against the pristine layout of the
// cell: ordinal 1 is the site of that species closest to the cell centroid,
// ties broken by polar angle around the centroid, then by site index.
int resolve_site_label(const Supercell& cell, const std::string& label);

// Applies the edits in order (labels always resolve against the pristine
// layout), then records the charge. Throws std::invalid_argument on unknown
// species, conflicting edits, or malformed labels.
Supercell apply_defect(const Supercell& pristine, const DefectSpec& spec,
                       const SpeciesTable& table = default_species_table());

// Scales every position and the cell vectors by (1 + s); composes with any
// strain already applied. s <= -1 is rejected.
Supercell apply_biaxial_strain(const Supercell& cell, double s);

// Canonical name of an edit set: one token per edit ("SB", "VN", bare "Ti"
// for an interstitial), joined with '-'; the site ordinal is appended
// whenever the edit set is not the one nearest-to-center placement would
// produce, which keeps distinct edit sets distinct.
std::string canonical_name(const Supercell& pristine_cell, const DefectSpec& spec);

struct Bond {
  int i = 0;       // source site
  int j = 0;       // target site
  int m1 = 0;      // image offset of j, units of a1
  int m2 = 0;      // image offset of j, units of a2
  double distance = 0.0; // angstrom
};

// Directed bonds (i -> j) for every pair closer than cutoff, including
// periodic images; vacant sites carry no bonds. Each undirected bond appears
// in both directions with opposite image offsets.
struct NeighborList {
  double cutoff = 0.0;
  std::vector<Bond> bonds;

  std::vector<int> coordination(int n_sites) const;
};

NeighborList neighbor_list(const Supercell& cell, double cutoff);

// Parses one defect spec per line: NAME CHARGE EDIT[;EDIT...] with edits
// sub:SITE:SPECIES, vac:SITE, int:CLUSTER:SPECIES. '#' starts a comment.
std::vector<DefectSpec> parse_defect_specs(const std::string& text);
DefectSpec parse_defect_line(const std::string& line);
std::vector<DefectSpec> load_defect_specs(const std::string& path);

} // namespace hbn::geometry

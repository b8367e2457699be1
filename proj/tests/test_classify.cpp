#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "hbnscreen/classify.hpp"
#include "hbnscreen/spectra.hpp"
#include "hbnscreen/types.hpp"

using namespace hbn;
using namespace hbn::classify;

namespace {

VectorX to_vec(const std::vector<double>& v) {
  VectorX out(int(v.size()));
  for (size_t i = 0; i < v.size(); ++i) out[int(i)] = v[i];
  return out;
}

// Hand-built solution on an arbitrary k set. One inner vector per k-point;
// eigenvectors stay empty because the classifier never touches them.
electronic::EigenSolution fabricate(const std::vector<Vec2>& pts,
                                    const std::vector<double>& wts,
                                    const std::vector<std::vector<double>>& eps_up,
                                    const std::vector<std::vector<double>>& occ_up,
                                    const std::vector<std::vector<double>>& eps_dn,
                                    const std::vector<std::vector<double>>& occ_dn) {
  electronic::EigenSolution sol;
  sol.grid.points = pts;
  sol.grid.weights = wts;
  for (size_t k = 0; k < pts.size(); ++k) {
    sol.spin[0].eigenvalues.push_back(to_vec(eps_up[k]));
    sol.spin[0].occupancy.push_back(to_vec(occ_up[k]));
    sol.spin[1].eigenvalues.push_back(to_vec(eps_dn[k]));
    sol.spin[1].occupancy.push_back(to_vec(occ_dn[k]));
  }
  const int nb = int(eps_up[0].size());
  for (int i = 0; i < nb; ++i) {
    sol.orbitals.site_of_row.push_back(i);
    sol.orbitals.row_of_site.push_back(i);
  }
  return sol;
}

// Single zone-center point, both spins identical.
electronic::EigenSolution single_k(const std::vector<double>& eps,
                                   const std::vector<double>& occ) {
  return fabricate({Vec2(0.0, 0.0)}, {1.0}, {eps}, {occ}, {eps}, {occ});
}

BandGap make_gap(double vbm, double cbm) {
  BandGap g;
  g.vbm = vbm;
  g.cbm = cbm;
  return g;
}

spectra::Spectrum spectrum_with_peak(double energy_ev, double height) {
  spectra::Spectrum s;
  s.photon_ev = spectra::uniform_grid(0.0, 6.5, 0.01);
  s.epsilon2 = VectorX::Zero(s.photon_ev.size());
  s.peaks.push_back({energy_ev, height});
  return s;
}

} // namespace

TEST_SUITE("classify") {

TEST_CASE("gap of an insulating zone-center solution") {
  auto sol = single_k({-1.0, 2.0}, {1.0, 0.0});
  BandGap g = find_gap(sol, 1, 1);
  CHECK(g.vbm == doctest::Approx(-1.0));
  CHECK(g.cbm == doctest::Approx(2.0));
  CHECK(g.gap() == doctest::Approx(3.0));
  CHECK(g.direct);
  CHECK(g.direct_at == "G");
}

TEST_CASE("indirect gap when the edges sit at different k-points") {
  // k0 holds the valence maximum, k1 the conduction minimum and the
  // smallest direct separation.
  auto sol = fabricate({Vec2(0.0, 0.0), Vec2(0.5, 0.0)}, {0.5, 0.5},
                       {{-1.0, 2.5}, {-1.2, 2.0}}, {{1.0, 0.0}, {1.0, 0.0}},
                       {{-1.0, 2.5}, {-1.2, 2.0}}, {{1.0, 0.0}, {1.0, 0.0}});
  BandGap g = find_gap(sol, 1, 1);
  CHECK(g.vbm == doctest::Approx(-1.0));
  CHECK(g.cbm == doctest::Approx(2.0));
  CHECK(!g.direct);
  CHECK(g.k_frac.x() == doctest::Approx(0.5));
  CHECK(g.direct_at == "M");
}

TEST_CASE("sampled point unfolds onto the primitive zone") {
  // On a 7x7 cell the supercell point (1/3,1/3) has (1/3+2)/7 = 1/3 among
  // its folded images, i.e. it carries the primitive K point.
  auto sol = fabricate({Vec2(0.0, 0.0), Vec2(1.0 / 3.0, 1.0 / 3.0)}, {0.5, 0.5},
                       {{-1.0, 3.0}, {-1.0, 2.0}}, {{1.0, 0.0}, {1.0, 0.0}},
                       {{-1.0, 3.0}, {-1.0, 2.0}}, {{1.0, 0.0}, {1.0, 0.0}});
  BandGap g = find_gap(sol, 7, 7);
  CHECK(g.direct);
  CHECK(g.direct_at == "K");
}

TEST_CASE("zone-center label survives folding that also reaches K") {
  // A 3x3 cell folds (0,0) onto K as well; the exact match found first wins.
  auto sol = single_k({-1.0, 2.0}, {1.0, 0.0});
  BandGap g = find_gap(sol, 3, 3);
  CHECK(g.direct_at == "G");
}

TEST_CASE("metallic fillings are rejected") {
  auto expect_metallic = [](const electronic::EigenSolution& sol) {
    try {
      (void)find_gap(sol, 1, 1);
      FAIL("expected a metallic rejection");
    } catch (const std::runtime_error& e) {
      CHECK(std::string(e.what()).find("metallic") != std::string::npos);
    }
  };
  expect_metallic(single_k({-1.0, 2.0}, {1.0, 0.5}));

  // Occupied states above empty ones at another k: edges overlap.
  expect_metallic(fabricate({Vec2(0.0, 0.0), Vec2(0.5, 0.0)}, {0.5, 0.5},
                            {{0.5, 2.0}, {0.3, 0.4}}, {{1.0, 0.0}, {1.0, 0.0}},
                            {{0.5, 2.0}, {0.3, 0.4}}, {{1.0, 0.0}, {1.0, 0.0}}));

  auto full = single_k({-1.0, 2.0}, {1.0, 1.0});
  CHECK_THROWS_AS(find_gap(full, 1, 1), std::runtime_error);

  electronic::EigenSolution empty;
  CHECK_THROWS_AS(find_gap(empty, 1, 1), std::invalid_argument);
  auto ok = single_k({-1.0, 2.0}, {1.0, 0.0});
  CHECK_THROWS_AS(find_gap(ok, 0, 1), std::invalid_argument);
}

TEST_CASE("in-gap levels: filtering, spin merge, ordering") {
  const BandGap gap = make_gap(-2.0, 3.0);
  // Five bands on two k-points. Band 0 lies in the valence region, band 3
  // sits exactly on the conduction edge, band 4 above it; only bands 1-2
  // produce levels.
  std::vector<std::vector<double>> eps_up = {
      {-5.0, 0.4999, 1.8, 3.0, 5.0}, {-5.0, 0.5001, 1.8, 3.0, 5.0}};
  std::vector<std::vector<double>> occ_up = {
      {1.0, 1.0, 0.0, 0.0, 0.0}, {1.0, 1.0, 0.0, 0.0, 0.0}};
  std::vector<std::vector<double>> eps_dn = {
      {-5.0, 0.5003, 1.8004, 3.0, 5.0}, {-5.0, 0.5005, 1.8004, 3.0, 5.0}};
  std::vector<std::vector<double>> occ_dn = {
      {1.0, 1.0, 1.0, 0.0, 0.0}, {1.0, 1.0, 1.0, 0.0, 0.0}};
  auto sol = fabricate({Vec2(0.0, 0.0), Vec2(0.5, 0.0)}, {0.5, 0.5},
                       eps_up, occ_up, eps_dn, occ_dn);

  auto levels = extract_defect_levels(sol, gap);
  REQUIRE(levels.size() == 3);

  // Band 1: opposite spins 0.4 meV apart with matching occupation, merged.
  CHECK(levels[0].spin == Spin::degenerate);
  CHECK(levels[0].energy_ev == doctest::Approx(0.5002).epsilon(1e-9));
  CHECK(levels[0].bandwidth_ev == doctest::Approx(2e-4).epsilon(1e-6));
  CHECK(levels[0].occupied);
  CHECK(levels[0].occupation == doctest::Approx(1.0));
  CHECK(levels[0].edge_distance_ev == doctest::Approx(2.4998).epsilon(1e-9));
  CHECK(levels[0].depth == Depth::deep);

  // Band 2: same energies within the window but opposite occupation, so the
  // channels stay separate.
  CHECK(levels[1].spin == Spin::up);
  CHECK(levels[1].energy_ev == doctest::Approx(1.8));
  CHECK(!levels[1].occupied);
  CHECK(levels[2].spin == Spin::down);
  CHECK(levels[2].energy_ev == doctest::Approx(1.8004));
  CHECK(levels[2].occupied);

  // Sorted ascending in energy.
  CHECK(levels[0].energy_ev < levels[1].energy_ev);
  CHECK(levels[1].energy_ev < levels[2].energy_ev);
}

TEST_CASE("spin merge picks the nearest partner") {
  const BandGap gap = make_gap(-2.0, 3.0);
  auto sol = fabricate({Vec2(0.0, 0.0)}, {1.0},
                       {{2.0}}, {{0.0}},
                       {{2.0003, 2.0008}}, {{0.0, 0.0}});
  // Down channel needs two bands; pad the up channel to match.
  sol.spin[0].eigenvalues[0] = to_vec({2.0, 9.0});
  sol.spin[0].occupancy[0] = to_vec({0.0, 0.0});
  sol.orbitals.site_of_row = {0, 1};
  sol.orbitals.row_of_site = {0, 1};

  auto levels = extract_defect_levels(sol, gap);
  REQUIRE(levels.size() == 2);
  CHECK(levels[0].spin == Spin::degenerate);
  CHECK(levels[0].energy_ev == doctest::Approx(0.5 * (2.0 + 2.0003)).epsilon(1e-12));
  CHECK(levels[1].spin == Spin::down);
  CHECK(levels[1].energy_ev == doctest::Approx(2.0008));
}

TEST_CASE("degeneracy window is a hard cutoff and an adjustable knob") {
  const BandGap gap = make_gap(-2.0, 3.0);
  auto near = fabricate({Vec2(0.0, 0.0)}, {1.0},
                        {{1.0}}, {{0.0}}, {{1.0 + 0.9e-3}}, {{0.0}});
  CHECK(extract_defect_levels(near, gap).size() == 1);

  auto apart = fabricate({Vec2(0.0, 0.0)}, {1.0},
                         {{1.0}}, {{0.0}}, {{1.0 + 2e-3}}, {{0.0}});
  auto split = extract_defect_levels(apart, gap);
  REQUIRE(split.size() == 2);
  CHECK(split[0].spin == Spin::up);
  CHECK(split[1].spin == Spin::down);

  LevelOptions wide;
  wide.degeneracy_tol_ev = 0.05;
  auto merged = extract_defect_levels(apart, gap, wide);
  REQUIRE(merged.size() == 1);
  CHECK(merged[0].spin == Spin::degenerate);

  CHECK_THROWS_AS(extract_defect_levels(near, make_gap(1.0, 1.0)),
                  std::invalid_argument);
}

TEST_CASE("depth rule: far from both edges and flat") {
  const BandGap gap = make_gap(0.0, 6.0);
  CHECK(classify_depth(3.0, 0.05, gap, 0.5, 0.1) == Depth::deep);
  // Boundary values count as deep.
  CHECK(classify_depth(0.5, 0.1, gap, 0.5, 0.1) == Depth::deep);
  // Too wide, too close, or both: shallow.
  CHECK(classify_depth(3.0, 0.11, gap, 0.5, 0.1) == Depth::shallow);
  CHECK(classify_depth(0.49, 0.05, gap, 0.5, 0.1) == Depth::shallow);
  CHECK(classify_depth(5.7, 0.05, gap, 0.5, 0.1) == Depth::shallow);
  // Monotone in the margin: relaxing it never demotes a deep level.
  CHECK(classify_depth(0.7, 0.05, gap, 0.5, 0.1) == Depth::deep);
  CHECK(classify_depth(0.7, 0.05, gap, 0.2, 0.1) == Depth::deep);
  CHECK(classify_depth(0.7, 0.05, gap, 0.8, 0.1) == Depth::shallow);
  CHECK_THROWS_AS(classify_depth(3.0, 0.05, gap, -0.1, 0.1), std::invalid_argument);
  CHECK_THROWS_AS(classify_depth(3.0, 0.05, gap, 0.5, -0.1), std::invalid_argument);
}

TEST_CASE("transition between gap levels") {
  const BandGap gap = make_gap(-2.0, 4.0);
  DefectLevel lo;
  lo.energy_ev = 1.0;
  lo.occupied = true;
  lo.spin = Spin::up;
  DefectLevel hi;
  hi.energy_ev = 3.2;
  hi.occupied = false;
  hi.spin = Spin::up;

  spectra::Spectrum empty;
  Transition t = first_order_transition({lo, hi}, empty, gap, "X", 0);
  CHECK(t.exists);
  CHECK(t.defect == "X");
  CHECK(t.charge == 0);
  CHECK(t.initial_ev == doctest::Approx(1.0));
  CHECK(t.final_ev == doctest::Approx(3.2));
  CHECK(t.energy_ev == doctest::Approx(2.2));
  CHECK(t.wavelength_nm == doctest::Approx(kEvNm / 2.2).epsilon(1e-9));
  CHECK(!t.from_valence);
  CHECK(t.type == "non-radiative"); // no spectrum to certify a peak
}

TEST_CASE("valence band fills in when no occupied gap level exists") {
  const BandGap gap = make_gap(-1.5, 4.0);
  DefectLevel empty_lvl;
  empty_lvl.energy_ev = 2.5;
  empty_lvl.occupied = false;

  auto spec = spectrum_with_peak(4.005, 1.0);
  Transition t = first_order_transition({empty_lvl}, spec, gap, "Y", -1);
  CHECK(t.exists);
  CHECK(t.from_valence);
  CHECK(t.initial_ev == doctest::Approx(-1.5));
  CHECK(t.energy_ev == doctest::Approx(4.0));
  // Peak 5 meV away on a 10 meV grid: radiative.
  CHECK(t.type == "radiative");

  // Push the peak outside one grid spacing and the label drops.
  auto far = spectrum_with_peak(4.03, 1.0);
  Transition t2 = first_order_transition({empty_lvl}, far, gap, "Y", -1);
  CHECK(t2.type == "non-radiative");
}

TEST_CASE("degenerate endpoints outrank a radiative peak") {
  const BandGap gap = make_gap(-2.0, 4.0);
  DefectLevel lo;
  lo.energy_ev = 1.0;
  lo.occupied = true;
  lo.spin = Spin::degenerate;
  DefectLevel hi;
  hi.energy_ev = 3.0;
  hi.occupied = false;
  hi.spin = Spin::degenerate;

  auto spec = spectrum_with_peak(2.0, 1.0);
  Transition t = first_order_transition({lo, hi}, spec, gap, "Z", 0);
  CHECK(t.type == "degenerate");

  // One degenerate endpoint is not enough.
  hi.spin = Spin::up;
  Transition t2 = first_order_transition({lo, hi}, spec, gap, "Z", 0);
  CHECK(t2.type == "radiative");
}

TEST_CASE("initial state must lie below the final one") {
  const BandGap gap = make_gap(-2.0, 4.0);
  DefectLevel a; // occupied, below
  a.energy_ev = 1.5;
  a.occupied = true;
  DefectLevel b; // occupied resonance above the empty level
  b.energy_ev = 2.8;
  b.occupied = true;
  DefectLevel c; // lowest unoccupied
  c.energy_ev = 2.0;
  c.occupied = false;

  spectra::Spectrum empty;
  Transition t = first_order_transition({a, b, c}, empty, gap, "W", 0);
  CHECK(t.initial_ev == doctest::Approx(1.5));
  CHECK(t.final_ev == doctest::Approx(2.0));
  CHECK(t.energy_ev == doctest::Approx(0.5));
}

TEST_CASE("no unoccupied level means no transition") {
  const BandGap gap = make_gap(-2.0, 4.0);
  DefectLevel full;
  full.energy_ev = 1.0;
  full.occupied = true;

  spectra::Spectrum empty;
  Transition t = first_order_transition({full}, empty, gap, "Q", 1);
  CHECK(!t.exists);
  CHECK(t.type == "none");
  Transition t2 = first_order_transition({}, empty, gap, "Q", 1);
  CHECK(!t2.exists);
}

TEST_CASE("histogram buckets by energy and type") {
  auto make = [](double e, const char* type) {
    Transition t;
    t.exists = true;
    t.energy_ev = e;
    t.type = type;
    return t;
  };
  Transition missing;
  missing.exists = false;

  std::vector<Transition> ts = {make(0.1, "radiative"), make(0.3, "radiative"),
                                make(0.3, "non-radiative"),
                                make(1.05, "degenerate"), missing};
  Histogram h = histogram(ts, 0.25);
  REQUIRE(h.bins.size() == 5);
  CHECK(h.total == 4);
  CHECK(h.bins[0].lo == doctest::Approx(0.0));
  CHECK(h.bins[0].hi == doctest::Approx(0.25));
  CHECK(h.bins[4].hi == doctest::Approx(1.25));
  CHECK(h.bins[0].counts.at("radiative") == 1);
  CHECK(h.bins[1].counts.at("radiative") == 1);
  CHECK(h.bins[1].counts.at("non-radiative") == 1);
  CHECK(h.bins[4].counts.at("degenerate") == 1);
  CHECK(h.bins[2].counts.empty());

  // Default width, empty input, bad width.
  CHECK(histogram({}).total == 0);
  CHECK(histogram({missing}).bins.empty());
  CHECK_THROWS_AS(histogram(ts, 0.0), std::invalid_argument);
}

} // TEST_SUITE

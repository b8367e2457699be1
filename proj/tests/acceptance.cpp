// Acceptance gate: one pass/fail line per criterion, nonzero exit on any
// failure. Each criterion carries its own runtime budget; exceeding it is a
// failure even when the physics checks out.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "hbnscreen/catalog.hpp"
#include "hbnscreen/classify.hpp"
#include "hbnscreen/electronic.hpp"
#include "hbnscreen/geometry.hpp"
#include "hbnscreen/kspace.hpp"
#include "hbnscreen/pipeline.hpp"
#include "hbnscreen/spectra.hpp"
#include "hbnscreen/tuning.hpp"
#include "hbnscreen/types.hpp"

using namespace hbn;

namespace {

std::string data_path(const std::string& name) {
  return std::string(HBN_DATA_DIR) + "/" + name;
}

struct Gate {
  int failed = 0;

  void run(int index, const std::string& name, double budget_s,
           const std::function<void(std::ostringstream&)>& body) {
    std::ostringstream detail;
    bool ok = true;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      body(detail);
    } catch (const std::exception& e) {
      detail << " threw: " << e.what();
    }
    const double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::string text = detail.str();
    if (!text.empty()) ok = false;
    if (elapsed > budget_s) {
      ok = false;
      text += " runtime " + std::to_string(elapsed) + " s exceeds budget " +
              std::to_string(budget_s) + " s";
    }
    std::ostringstream line;
    line.precision(1);
    line << std::fixed << (ok ? "PASS" : "FAIL") << " criterion " << index << ": "
         << name << " (" << elapsed << "s)";
    if (!ok) line << " --" << text;
    std::cout << line.str() << "\n";
    if (!ok) ++failed;
  }
};

// Appends a failure note when the condition does not hold.
void expect(bool cond, const std::string& what, std::ostringstream& detail) {
  if (!cond) detail << " [" << what << "]";
}

geometry::DefectSpec spec_from_line(const std::string& line) {
  return geometry::parse_defect_line(line);
}

} // namespace

int main() {
  Gate gate;

  // ---------------------------------------------------------------- 1
  gate.run(1, "pristine band structure: direct 5.99 eV gap at K", 5.0, [&](auto& detail) {
    auto params = electronic::fit_pristine_params(5.99, 5.0, electronic::default_params());
    auto cell = geometry::build_supercell(geometry::LatticeSpec::hexagonal(2.504), 1, 1);
    auto scf = electronic::scf_solve(cell, params, kspace::monkhorst_pack(5, 5));
    auto path = kspace::high_symmetry_path(cell.a1(), cell.a2(), 40);
    auto bs = electronic::band_structure(cell, params, scf.mean_field, path);

    int min_at = 0;
    double min_gap = 1e300;
    for (int i = 0; i < bs.bands[0].rows(); ++i) {
      const double g = std::min(bs.bands[0](i, 1) - bs.bands[0](i, 0),
                                bs.bands[1](i, 1) - bs.bands[1](i, 0));
      if (g < min_gap) {
        min_gap = g;
        min_at = i;
      }
    }
    const int k_vertex = path.vertex_indices[2]; // G, M, K, G
    expect(min_at == k_vertex, "smallest direct separation not at the K vertex", detail);
    expect(std::abs(min_gap - 5.99) <= 0.05,
           "gap " + std::to_string(min_gap) + " eV departs from 5.99 by more than 0.05",
           detail);
  });

  // ---------------------------------------------------------------- 2
  gate.run(2, "reference table: photon consistency and target pairings", 1.0,
           [&](auto& detail) {
    auto records = catalog::load_dataset(data_path("table1.csv"));
    expect(records.size() == 21, "expected 21 bundled records", detail);
    for (const auto& r : records)
      expect(std::abs(kEvNm / r.transition_ev - r.wavelength_nm) <= 1.0,
             r.name + ": wavelength disagrees with hc/E beyond 1.0 nm", detail);

    auto matches = catalog::match_targets(records, catalog::builtin_targets(), 25.0);
    struct Pair {
      double target;
      const char* name;
      int charge;
    };
    // Every published defect <-> application pairing, including the rows
    // shared by two targets.
    const std::vector<Pair> expected = {
        {552, "SB-VB", 0},      {552, "InB-VN", 0},     {552, "InN-VB", 0},
        {589, "OB-VB", 0},      {590, "TiN-VB", 0},     {590, "VN-VB-Ti", 0},
        {602, "ErB-NB-VN", 0},  {606, "SnB-VB", 0},     {620, "VN-VB", 0},
        {637, "AlN", 0},        {738, "VB-VB", 0},      {780, "ErB-VB", 0},
        {780, "ErN-VB", 0},     {793, "InB-VB", 0},     {793, "ErN-NB-VN", 0},
        {793, "AlB-VB", 0},     {795, "InB-VB", 0},     {795, "ErN-NB-VN", 0},
        {795, "AlB-VB", 0},     {850, "ErN-VN", 0},     {852, "ErN-VN", 0},
        {862, "ErB-VN", -1},    {894, "ErB-VB", 1},     {1330, "ON-SN", 0},
        {1550, "ErB", 1},
    };
    for (const auto& want : expected) {
      bool found = false;
      for (const auto& tm : matches) {
        if (tm.target.wavelength_nm != want.target) continue;
        for (const auto& c : tm.candidates)
          if (c.record.name == want.name && c.record.charge == want.charge)
            found = true;
      }
      std::ostringstream tag;
      tag << want.name << " missing from the " << want.target << " nm target";
      expect(found, tag.str(), detail);
    }
  });

  // ---------------------------------------------------------------- 3
  gate.run(3, "dataset totals [REDUCED-SCOPE: bundled 21-row extract, not the "
              "full 205-defect survey]", 1.0, [&](auto& detail) {
    auto records = catalog::load_dataset(data_path("table1.csv"));
    int neutral = 0;
    int radiative = 0;
    for (const auto& r : records) {
      if (r.charge == 0) ++neutral;
      if (r.type == "radiative") ++radiative;
    }
    // The extract bundles 18 neutral + 3 charged rows, all radiative by
    // construction; full-survey totals are not derivable from it.
    expect(records.size() == 21, "expected 21 records", detail);
    expect(neutral == 18, "expected 18 neutral records", detail);
    expect(radiative == int(records.size()), "every extract row must be radiative",
           detail);
  });

  // ---------------------------------------------------------------- 4
  {
    pipeline::Pipeline pipe(electronic::default_params());
    gate.run(4, "carbon donor: one filled and one empty gap level, opposite spins",
             30.0, [&](auto& detail) {
      auto a = pipe.analyze(spec_from_line("CB 0 sub:B1:C"));
      expect(a.levels.size() == 2, "expected exactly two gap levels", detail);
      if (a.levels.size() == 2) {
        const auto& lo = a.levels[0];
        const auto& hi = a.levels[1];
        expect(lo.occupied && !hi.occupied, "lower level filled, upper empty", detail);
        expect(lo.spin != hi.spin, "levels must sit in opposite spin channels", detail);
        expect(lo.spin != classify::Spin::degenerate &&
                   hi.spin != classify::Spin::degenerate,
               "neither level may merge across spins", detail);
      }
    });
    gate.run(4, "isoelectronic aluminium substitution leaves the gap empty", 30.0,
             [&](auto& detail) {
      auto a = pipe.analyze(spec_from_line("AlB 0 sub:B1:Al"));
      expect(a.levels.empty(), "AlB must induce no gap levels", detail);
      expect(!a.transition.exists, "AlB must have no transition", detail);
    });
    gate.run(4, "isoelectronic gallium substitution leaves the gap empty", 30.0,
             [&](auto& detail) {
      auto a = pipe.analyze(spec_from_line("GaB 0 sub:B1:Ga"));
      expect(a.levels.empty(), "GaB must induce no gap levels", detail);
      expect(!a.transition.exists, "GaB must have no transition", detail);
    });
  }

  // ---------------------------------------------------------------- 5
  gate.run(5, "charge states shift the electron count and the Fermi level", 120.0,
           [&](auto& detail) {
    auto lattice = geometry::LatticeSpec::hexagonal(2.504);
    auto params = electronic::default_params();
    auto grid = kspace::monkhorst_pack(3, 3);
    for (const std::string& line :
         {std::string("CB 0 sub:B1:C"), std::string("VN 0 vac:N1"),
          std::string("CN 0 sub:N1:C")}) {
      auto spec = spec_from_line(line);
      auto base = geometry::build_supercell(lattice, 5, 5);
      auto solve_charge = [&](int q) {
        auto charged = spec;
        charged.charge = q;
        auto cell = geometry::apply_defect(base, charged);
        return electronic::scf_solve(cell, params, grid);
      };
      auto neutral = solve_charge(0);
      auto minus = solve_charge(-1);
      auto plus = solve_charge(+1);
      const int n0 = neutral.solution.electron_count;
      expect(minus.solution.electron_count == n0 + 1,
             spec.name + ": charge -1 must add one electron", detail);
      expect(plus.solution.electron_count == n0 - 1,
             spec.name + ": charge +1 must remove one electron", detail);
      expect(minus.solution.fermi_level > neutral.solution.fermi_level,
             spec.name + ": charge -1 must raise the Fermi level", detail);
      expect(plus.solution.fermi_level < neutral.solution.fermi_level,
             spec.name + ": charge +1 must lower the Fermi level", detail);
    }
  });

  // ---------------------------------------------------------------- 6
  gate.run(6, "strain tuner: synthetic benchmark and sulfur-vacancy retune", 300.0,
           [&](auto& detail) {
    tuning::WavelengthFn synthetic = [](double s) {
      return std::optional<double>(600.0 + 5000.0 * s);
    };
    auto bench = tuning::solve_strain_for_target(synthetic, 605.0, -0.02, 0.02, 0.0);
    expect(std::abs(bench.strain - 0.001) <= 1e-6,
           "synthetic benchmark missed s = 0.001 by more than 1e-6", detail);

    auto specs = geometry::load_defect_specs(data_path("defects.txt"));
    auto it = std::find_if(specs.begin(), specs.end(),
                           [](const auto& s) { return s.name == "SB-VB"; });
    expect(it != specs.end(), "SB-VB missing from the defect definitions", detail);
    if (it != specs.end()) {
      pipeline::Pipeline pipe(electronic::default_params());
      pipe.set_calibration_file(data_path("calibration.txt"));
      auto res = tuning::solve_strain_for_target(pipe, *it, 552.0, -0.02, 0.02, 1.0);
      const double mag = std::abs(res.strain);
      std::ostringstream tag;
      tag << "required strain magnitude " << mag << " outside [1e-4, 1e-2]";
      expect(mag >= 1e-4 && mag <= 1e-2, tag.str(), detail);
      expect(std::abs(res.wavelength_nm - 552.0) <= 1.0,
             "tuned wavelength missed 552 nm beyond 1 nm", detail);
    }
  });

  // ---------------------------------------------------------------- 7
  gate.run(7, "numerical properties: hermiticity, orthonormality, symmetry, "
              "normalization, convergence", 600.0, [&](auto& detail) {
    auto lattice = geometry::LatticeSpec::hexagonal(2.504);
    auto params = electronic::default_params();

    // Hermiticity at a generic k on a defected cell, 1e-14.
    auto cell = geometry::apply_defect(geometry::build_supercell(lattice, 3, 3),
                                       spec_from_line("VN 0 vac:N1"));
    auto bonds = geometry::neighbor_list(cell, params.hopping_cutoff);
    auto omap = electronic::make_orbital_map(cell);
    VectorX opp = VectorX::Constant(int(cell.sites.size()), 0.5);
    auto h = electronic::assemble_hamiltonian(cell, params, bonds, omap,
                                              Vec2(0.123, 0.456), opp);
    expect((h - h.adjoint()).cwiseAbs().maxCoeff() <= 1e-14,
           "hamiltonian hermiticity above 1e-14", detail);

    // Orthonormal eigenvectors (1e-9) and k/-k eigenvalue symmetry (1e-9 eV)
    // from one converged defect run.
    auto scf = electronic::scf_solve(cell, params, kspace::monkhorst_pack(2, 2));
    kspace::KGrid pair;
    pair.points = {Vec2(0.31, -0.17), Vec2(-0.31, 0.17)};
    pair.weights = {0.5, 0.5};
    auto frozen = electronic::solve_frozen(cell, params, scf.mean_field, pair);
    for (int s = 0; s < 2; ++s) {
      const auto& v = frozen.spin[s].eigenvectors[0];
      MatrixXc gram = v.adjoint() * v;
      expect((gram - MatrixXc::Identity(v.cols(), v.cols())).cwiseAbs().maxCoeff() <=
                 1e-9,
             "eigenvector orthonormality above 1e-9", detail);
      expect((frozen.spin[s].eigenvalues[0] - frozen.spin[s].eigenvalues[1])
                     .cwiseAbs()
                     .maxCoeff() <= 1e-9,
             "k/-k eigenvalue symmetry above 1e-9 eV", detail);
    }

    // DOS integrates to the state count within 1%.
    auto dense = electronic::solve_frozen(cell, params, scf.mean_field,
                                          kspace::gamma_centered(3, 3));
    auto grid = spectra::uniform_grid(-40.0, 40.0, 0.01);
    auto curve = spectra::dos(dense, grid, 0.05);
    double integral = 0.0;
    for (int i = 1; i < curve.x.size(); ++i)
      integral += 0.5 * (curve.y[i] + curve.y[i - 1]) * (curve.x[i] - curve.x[i - 1]);
    const double states = 2.0 * omap.rows();
    expect(std::abs(integral - states) <= 0.01 * states,
           "DOS normalization off by more than 1%", detail);

    // The SCF reports convergence below the 1e-4 eV tolerance.
    expect(!scf.mean_field.residual_history.empty() &&
               scf.mean_field.residual_history.back() < 1e-4,
           "SCF residual not below 1e-4 eV", detail);

    // Uniform strain is exactly a hopping rescale: spectra agree to 1e-10 eV.
    const double s = 0.015;
    auto strained = geometry::apply_biaxial_strain(cell, s);
    auto rescaled = params;
    rescaled.t0 = params.t0 * std::pow(1.0 + s, -params.eta);
    auto mf_a = electronic::scf_solve(strained, params, kspace::monkhorst_pack(2, 2));
    auto mf_b = electronic::scf_solve(cell, rescaled, kspace::monkhorst_pack(2, 2));
    for (int k = 0; k < 4; ++k) {
      expect((mf_a.solution.spin[0].eigenvalues[size_t(k)] -
              mf_b.solution.spin[0].eigenvalues[size_t(k)])
                     .cwiseAbs()
                     .maxCoeff() <= 1e-10,
             "strain covariance identity above 1e-10 eV", detail);
    }

    // The central-vacancy level settles as the supercell grows: each doubling
    // of the edge shrinks the image interaction, so consecutive energy deltas
    // must shrink too. Absolute level energies are comparable across sizes
    // (the onsite table fixes the energy zero); offsets against the pristine
    // band edge would not be, because the dense grid folds differently per
    // cell size and wobbles the edge by a few meV.
    auto vacancy_level = [&](int n) {
      pipeline::Options opt;
      opt.n1 = n;
      opt.n2 = n;
      pipeline::Pipeline pipe(params, opt);
      auto a = pipe.analyze(spec_from_line("VB 0 vac:B1"));
      expect(!a.levels.empty(), "central vacancy must show a gap level", detail);
      double top = a.levels.front().energy_ev;
      for (const auto& lvl : a.levels) top = std::max(top, lvl.energy_ev);
      return top;
    };
    const double m3 = vacancy_level(3);
    const double m5 = vacancy_level(5);
    const double m7 = vacancy_level(7);
    std::ostringstream tag;
    tag << "supercell deltas must shrink: |" << m5 << " - " << m3 << "| vs |" << m7
        << " - " << m5 << "|";
    expect(std::abs(m7 - m5) < std::abs(m5 - m3), tag.str(), detail);
  });

  std::cout << (gate.failed == 0 ? "acceptance: all criteria passed"
                                 : "acceptance: " + std::to_string(gate.failed) +
                                       " criterion group(s) failed")
            << "\n";
  return gate.failed == 0 ? 0 : 1;
}

#include <CLI11.hpp>

#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <variant>

#include "hbnscreen/catalog.hpp"
#include "hbnscreen/classify.hpp"
#include "hbnscreen/config.hpp"
#include "hbnscreen/electronic.hpp"
#include "hbnscreen/geometry.hpp"
#include "hbnscreen/kspace.hpp"
#include "hbnscreen/pipeline.hpp"
#include "hbnscreen/tuning.hpp"
#include "hbnscreen/types.hpp"

namespace {

using namespace hbn;

struct Output {
  std::ofstream file;
  std::ostream* os = &std::cout;

  void open(const std::string& path) {
    if (path.empty()) return;
    file.open(path);
    if (!file) throw std::runtime_error("cannot write output file: " + path);
    os = &file;
  }
};

bool file_exists(const std::string& path) {
  std::ifstream probe(path);
  return bool(probe);
}

electronic::TBParams load_model(const config::RunConfig& cfg, bool explicit_path) {
  if (file_exists(cfg.params)) return electronic::load_params(cfg.params);
  if (explicit_path)
    throw std::runtime_error("cannot open params file: " + cfg.params);
  return electronic::default_params();
}

void attach_calibration(pipeline::Pipeline& pipe, const config::RunConfig& cfg,
                        bool explicit_path) {
  if (cfg.calibration.empty()) return;
  if (file_exists(cfg.calibration)) {
    pipe.set_calibration_file(cfg.calibration);
    return;
  }
  if (explicit_path)
    throw std::runtime_error("cannot open calibration file: " + cfg.calibration);
}

geometry::DefectSpec resolve_defect(const std::string& arg,
                                    const config::RunConfig& cfg) {
  if (arg.find(':') != std::string::npos) return geometry::parse_defect_line(arg);
  auto specs = geometry::load_defect_specs(cfg.defects);
  for (const auto& s : specs)
    if (s.name == arg) return s;
  std::ostringstream msg;
  msg << "defect '" << arg << "' not found in " << cfg.defects << "; available:";
  for (const auto& s : specs) msg << " " << s.name;
  throw std::invalid_argument(msg.str());
}

const char* spin_name(classify::Spin s) {
  switch (s) {
    case classify::Spin::up: return "up";
    case classify::Spin::down: return "down";
    default: return "degenerate";
  }
}

void print_analysis(std::ostream& os, const pipeline::DefectAnalysis& a) {
  os << "defect " << a.spec.name << " charge " << a.spec.charge << " strain "
     << config::format_double(a.strain) << "\n";
  os << std::fixed << std::setprecision(6);
  os << "  scf iterations " << a.mf.iterations << " energy " << a.mf.total_energy
     << "\n";
  os << "  pristine vbm " << a.pristine_gap.vbm << " cbm " << a.pristine_gap.cbm
     << " gap " << a.pristine_gap.gap() << " at " << a.pristine_gap.direct_at
     << "\n";
  for (const auto& lvl : a.levels) {
    os << "  level energy " << lvl.energy_ev << " spin " << spin_name(lvl.spin)
       << " occupation " << lvl.occupation << " width " << lvl.bandwidth_ev
       << " edge " << lvl.edge_distance_ev << " "
       << (lvl.depth == classify::Depth::deep ? "deep" : "shallow") << "\n";
  }
  const auto& t = a.transition;
  if (t.exists) {
    os << "  transition type " << t.type << " energy " << t.energy_ev
       << " wavelength " << std::setprecision(4) << t.wavelength_nm
       << std::setprecision(6) << " initial " << t.initial_ev << " final "
       << t.final_ev << (t.from_valence ? " from_valence" : "") << "\n";
  } else {
    os << "  transition none\n";
  }
  os.unsetf(std::ios::floatfield);
  os << std::setprecision(6);
}

int cmd_fit_params(const config::RunConfig& cfg, const std::string& out_path) {
  if (out_path.empty())
    throw std::invalid_argument("fit-params needs --out FILE for the fitted table");
  auto fitted = electronic::fit_pristine_params(cfg.fit_gap_ev, cfg.fit_bandwidth_ev,
                                                electronic::default_params());
  electronic::save_params(fitted, out_path);
  config::write_snapshot(std::cout, cfg, "fit-params");
  std::cout << "t0 = " << config::format_double(fitted.t0) << "\n";
  std::cout << "onsite.B = " << config::format_double(fitted.onsite_of("B")) << "\n";
  std::cout << "onsite.N = " << config::format_double(fitted.onsite_of("N")) << "\n";
  std::cout << "written " << out_path << "\n";
  return 0;
}

int cmd_bands(const config::RunConfig& cfg, const std::string& defect_arg,
              double strain, const std::string& out_path, bool params_explicit,
              bool cal_explicit) {
  auto params = load_model(cfg, params_explicit);
  pipeline::Pipeline pipe(params, cfg.pipeline_options());
  attach_calibration(pipe, cfg, cal_explicit);

  Output out;
  out.open(out_path);
  config::write_snapshot(*out.os, cfg, "bands");

  geometry::Supercell cell;
  electronic::MeanFieldState mf;
  electronic::TBParams model = params;
  if (defect_arg.empty()) {
    const auto& ref = pipe.pristine(strain);
    cell = ref.cell;
    mf = ref.mf;
    *out.os << "bands pristine strain " << config::format_double(strain) << "\n";
  } else {
    auto spec = resolve_defect(defect_arg, cfg);
    auto a = pipe.analyze(spec, strain);
    cell = a.cell;
    mf = a.mf;
    model = pipe.params_for(spec.name);
    *out.os << "bands " << spec.name << " charge " << spec.charge << " strain "
            << config::format_double(strain) << "\n";
  }

  auto path = kspace::high_symmetry_path(cell.a1(), cell.a2(), cfg.path_points);
  auto bs = electronic::band_structure(cell, model, mf, path);

  *out.os << std::fixed << std::setprecision(6);
  for (size_t v = 0; v < path.vertex_labels.size(); ++v)
    *out.os << "# vertex " << path.vertex_labels[v] << " "
            << path.cumulative[path.vertex_indices[v]] << "\n";
  *out.os << "# columns: sample arc band e_up e_down\n";
  const int nb = int(bs.bands[0].cols());
  for (size_t i = 0; i < path.samples.size(); ++i)
    for (int b = 0; b < nb; ++b)
      *out.os << i << " " << path.cumulative[i] << " " << b << " "
              << bs.bands[0](int(i), b) << " " << bs.bands[1](int(i), b) << "\n";
  return 0;
}

int cmd_screen(const config::RunConfig& cfg, const std::vector<std::string>& only,
               double strain, const std::string& out_path, bool params_explicit,
               bool cal_explicit) {
  auto params = load_model(cfg, params_explicit);
  pipeline::Pipeline pipe(params, cfg.pipeline_options());
  attach_calibration(pipe, cfg, cal_explicit);

  auto specs = geometry::load_defect_specs(cfg.defects);
  if (!only.empty()) {
    std::vector<geometry::DefectSpec> picked;
    for (const auto& name : only) {
      bool found = false;
      for (const auto& s : specs)
        if (s.name == name) {
          picked.push_back(s);
          found = true;
          break;
        }
      if (!found)
        throw std::invalid_argument("defect '" + name + "' not found in " +
                                    cfg.defects);
    }
    specs = picked;
  }

  Output out;
  out.open(out_path);
  config::write_snapshot(*out.os, cfg, "screen");

  std::vector<classify::Transition> transitions;
  for (const auto& spec : specs) {
    try {
      auto a = pipe.analyze(spec, strain);
      print_analysis(*out.os, a);
      transitions.push_back(a.transition);
    } catch (const std::exception& e) {
      *out.os << "error " << spec.name << " " << e.what() << "\n";
    }
  }

  *out.os << std::fixed << std::setprecision(6);
  for (const auto& t : transitions) {
    *out.os << "summary " << t.defect << " " << t.charge;
    if (t.exists)
      *out.os << " " << t.energy_ev << " " << std::setprecision(4)
              << t.wavelength_nm << std::setprecision(6) << " " << t.type << "\n";
    else
      *out.os << " none\n";
  }
  auto hist = classify::histogram(transitions);
  *out.os << std::setprecision(2);
  for (const auto& bin : hist.bins)
    for (const auto& [type, count] : bin.counts)
      *out.os << "hist " << bin.lo << " " << bin.hi << " " << type << " " << count
              << "\n";
  *out.os << "total " << hist.total << "\n";
  return 0;
}

int cmd_tune(const config::RunConfig& cfg, const std::string& defect_arg,
             const std::optional<double>& target_nm, const std::string& out_path,
             bool params_explicit, bool cal_explicit) {
  auto spec = resolve_defect(defect_arg, cfg);
  auto params = load_model(cfg, params_explicit);
  pipeline::Pipeline pipe(params, cfg.pipeline_options());
  attach_calibration(pipe, cfg, cal_explicit);

  Output out;
  out.open(out_path);
  config::write_snapshot(*out.os, cfg, "tune");
  *out.os << "tune " << spec.name << " charge " << spec.charge << "\n";

  auto grid = tuning::strain_grid(cfg.strain_lo, cfg.strain_hi, cfg.sweep_points);
  auto curve = tuning::sweep(pipe, spec, grid);
  *out.os << std::fixed << std::setprecision(6);
  for (const auto& s : curve.samples) {
    *out.os << "sample strain " << s.strain;
    if (s.has_transition)
      *out.os << " energy " << s.energy_ev << " wavelength " << std::setprecision(4)
              << s.wavelength_nm << std::setprecision(6) << " type " << s.type
              << "\n";
    else
      *out.os << " none\n";
  }

  auto fit = tuning::fit_curve(curve);
  *out.os << "fit degree " << fit.degree;
  out.os->unsetf(std::ios::floatfield);
  *out.os << std::setprecision(10);
  for (int j = 0; j < fit.coeffs.size(); ++j) *out.os << " c" << j << " "
                                                      << fit.coeffs(j);
  *out.os << " rms " << fit.rms_residual << "\n";

  if (target_nm) {
    auto res = tuning::solve_strain_for_target(pipe, spec, *target_nm,
                                               cfg.strain_lo, cfg.strain_hi,
                                               cfg.tune_tol_nm);
    *out.os << std::fixed << std::setprecision(8);
    *out.os << "solve target " << std::setprecision(4) << *target_nm
            << " strain " << std::setprecision(8) << res.strain << " wavelength "
            << std::setprecision(4) << res.wavelength_nm << " energy "
            << std::setprecision(6) << res.energy_ev << " evaluations "
            << res.trace.size() << "\n";
  }
  return 0;
}

int cmd_match(const config::RunConfig& cfg, const std::optional<double>& target_nm,
              const std::string& out_path) {
  auto records = catalog::load_dataset(cfg.dataset);
  std::vector<catalog::Target> targets;
  if (target_nm)
    targets.push_back({*target_nm, "custom", "user"});
  else
    targets = catalog::builtin_targets();

  auto matches = catalog::match_targets(records, targets, cfg.match_tol_nm);

  Output out;
  out.open(out_path);
  config::write_snapshot(*out.os, cfg, "match");
  *out.os << std::fixed << std::setprecision(4);
  for (const auto& tm : matches) {
    *out.os << "target " << std::setprecision(2) << tm.target.wavelength_nm
            << std::setprecision(4) << " " << tm.target.label << " ["
            << tm.target.category << "]\n";
    if (tm.candidates.empty()) {
      *out.os << "  none\n";
      continue;
    }
    for (const auto& m : tm.candidates) {
      *out.os << "  match " << m.record.name << " charge " << m.record.charge
              << " wavelength " << m.record.wavelength_nm << " delta "
              << (m.delta_nm >= 0 ? "+" : "") << m.delta_nm << "\n";
    }
  }
  return 0;
}

int cmd_calibrate(const config::RunConfig& cfg, const std::string& defect_arg,
                  double target_ev, std::string species, double lo, double hi,
                  double tol_ev, std::string out_path, bool params_explicit) {
  auto spec = resolve_defect(defect_arg, cfg);
  if (species.empty()) {
    for (const auto& e : spec.edits) {
      if (const auto* s = std::get_if<geometry::SubstitutionEdit>(&e)) {
        species = s->new_species;
        break;
      }
      if (const auto* t = std::get_if<geometry::InterstitialEdit>(&e)) {
        species = t->species;
        break;
      }
    }
  }
  if (species.empty())
    throw std::invalid_argument(
        "defect " + spec.name +
        " introduces no new species; onsite calibration needs a substitution "
        "or an interstitial");
  if (!(lo < hi)) throw std::invalid_argument("calibration bracket needs lo < hi");
  if (!(tol_ev > 0.0)) throw std::invalid_argument("calibration tolerance must be positive");

  auto base = load_model(cfg, params_explicit);
  pipeline::Pipeline pipe(base, cfg.pipeline_options());

  auto energy_at = [&](double x) -> std::optional<double> {
    auto p = base;
    p.onsite[species] = x;
    auto a = pipe.analyze_with(spec, p, 0.0);
    if (!a.transition.exists) return std::nullopt;
    return a.transition.energy_ev;
  };

  config::write_snapshot(std::cout, cfg, "calibrate");
  std::cout << "calibrate " << spec.name << " onsite." << species << " target "
            << config::format_double(target_ev) << " ev\n";
  std::cout << std::fixed << std::setprecision(6);

  const int scan_points = 13;
  std::vector<std::pair<double, double>> scan; // (onsite, transition energy)
  for (int i = 0; i < scan_points; ++i) {
    const double x = lo + (hi - lo) * i / (scan_points - 1);
    auto e = energy_at(x);
    if (e) {
      std::cout << "scan onsite " << x << " energy " << *e << "\n";
      scan.emplace_back(x, *e);
    } else {
      std::cout << "scan onsite " << x << " none\n";
    }
  }
  if (scan.empty())
    throw std::runtime_error("no transition anywhere on the onsite bracket");

  double a = 0.0, b = 0.0, fa = 0.0, fb = 0.0;
  bool bracketed = false;
  for (size_t i = 0; i + 1 < scan.size(); ++i) {
    const double g1 = scan[i].second - target_ev;
    const double g2 = scan[i + 1].second - target_ev;
    if (g1 == 0.0 || g1 * g2 < 0.0) {
      a = scan[i].first;
      b = scan[i + 1].first;
      fa = g1;
      fb = g2;
      bracketed = true;
      break;
    }
  }
  if (!bracketed) {
    double emin = scan[0].second, emax = scan[0].second;
    for (const auto& [x, e] : scan) {
      emin = std::min(emin, e);
      emax = std::max(emax, e);
    }
    std::ostringstream msg;
    msg << "target " << target_ev << " ev is outside the achievable range ["
        << emin << ", " << emax << "] ev on this onsite bracket";
    throw std::runtime_error(msg.str());
  }

  double best_x = std::abs(fa) <= std::abs(fb) ? a : b;
  double best_f = std::abs(fa) <= std::abs(fb) ? fa : fb;
  while (b - a > 1e-6 && std::abs(best_f) > tol_ev) {
    const double mid = 0.5 * (a + b);
    auto e = energy_at(mid);
    if (!e) {
      std::ostringstream msg;
      msg << "transition disappears at onsite " << mid;
      throw std::runtime_error(msg.str());
    }
    const double fm = *e - target_ev;
    if (std::abs(fm) < std::abs(best_f)) {
      best_x = mid;
      best_f = fm;
    }
    if (fa * fm <= 0.0) {
      b = mid;
      fb = fm;
    } else {
      a = mid;
      fa = fm;
    }
  }

  std::cout << "calibrated " << spec.name << ".onsite." << species << " = "
            << config::format_double(best_x) << " energy "
            << config::format_double(best_f + target_ev) << "\n";

  if (out_path.empty()) out_path = cfg.calibration;
  if (!out_path.empty()) {
    std::ofstream app_out(out_path, std::ios::app);
    if (!app_out) throw std::runtime_error("cannot write calibration file: " + out_path);
    app_out << spec.name << ".onsite." << species << " = "
            << config::format_double(best_x) << "\n";
    std::cout << "written " << out_path << "\n";
  }
  return 0;
}

} // namespace

int main(int argc, char** argv) {
  config::RunConfig cfg;

  // The settings file loads before the flags bind so that explicit flags win.
  try {
    std::string pre;
    for (int i = 1; i < argc; ++i) {
      std::string a = argv[i];
      if (a == "--config" && i + 1 < argc) pre = argv[i + 1];
      else if (a.rfind("--config=", 0) == 0) pre = a.substr(9);
    }
    if (!pre.empty()) cfg.apply_file(pre);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }

  CLI::App app{"Tight-binding screening of fluorescent point defects in hexagonal boron nitride"};
  app.set_version_flag("--version", std::string(kVersion));
  std::string config_path;
  app.add_option("--config", config_path, "flat key = value settings file; flags override");

  auto* opt_params = app.add_option("--params", cfg.params, "tight-binding parameter file")
                         ->capture_default_str();
  auto* opt_cal = app.add_option("--calibration", cfg.calibration,
                                 "per-defect onsite calibration file")
                      ->capture_default_str();
  app.add_option("--defects", cfg.defects, "defect definitions file")->capture_default_str();
  app.add_option("--dataset", cfg.dataset, "screened transition table (csv)")->capture_default_str();
  app.add_option("--a0", cfg.a0, "lattice constant, angstrom")->capture_default_str();
  app.add_option("--n1", cfg.n1, "supercell repeats along a1")->capture_default_str();
  app.add_option("--n2", cfg.n2, "supercell repeats along a2")->capture_default_str();
  app.add_option("--scf_n1", cfg.scf_n1, "scf mesh divisions along b1")->capture_default_str();
  app.add_option("--scf_n2", cfg.scf_n2, "scf mesh divisions along b2")->capture_default_str();
  app.add_option("--dense_n1", cfg.dense_n1, "analysis mesh divisions along b1")->capture_default_str();
  app.add_option("--dense_n2", cfg.dense_n2, "analysis mesh divisions along b2")->capture_default_str();
  app.add_option("--scf_tol_ev", cfg.scf_tol_ev, "scf energy tolerance")->capture_default_str();
  app.add_option("--scf_max_iter", cfg.scf_max_iter, "scf sweep limit")->capture_default_str();
  app.add_option("--scf_mixing", cfg.scf_mixing, "occupation mixing weight")->capture_default_str();
  app.add_option("--seed_field_ev", cfg.seed_field_ev, "symmetry-breaking seed field")->capture_default_str();
  app.add_option("--sigma_ev", cfg.sigma_ev, "gaussian broadening")->capture_default_str();
  app.add_option("--photon_min_ev", cfg.photon_min_ev, "photon grid start")->capture_default_str();
  app.add_option("--photon_max_ev", cfg.photon_max_ev, "photon grid end")->capture_default_str();
  app.add_option("--photon_step_ev", cfg.photon_step_ev, "photon grid spacing")->capture_default_str();
  app.add_option("--peak_floor_rel", cfg.peak_floor_rel, "peak floor relative to the pristine response")->capture_default_str();
  app.add_option("--degeneracy_tol_ev", cfg.degeneracy_tol_ev, "cross-spin merge window")->capture_default_str();
  app.add_option("--edge_margin_ev", cfg.edge_margin_ev, "deep-level distance from the band edges")->capture_default_str();
  app.add_option("--flat_tol_ev", cfg.flat_tol_ev, "deep-level bandwidth limit")->capture_default_str();
  app.add_option("--strain_lo", cfg.strain_lo, "strain bracket lower end")->capture_default_str();
  app.add_option("--strain_hi", cfg.strain_hi, "strain bracket upper end")->capture_default_str();
  app.add_option("--sweep_points", cfg.sweep_points, "strain sweep sample count")->capture_default_str();
  app.add_option("--tune_tol_nm", cfg.tune_tol_nm, "wavelength tolerance for tuning")->capture_default_str();
  app.add_option("--match_tol_nm", cfg.match_tol_nm, "target match tolerance")->capture_default_str();
  app.add_option("--path_points", cfg.path_points, "samples per band path segment")->capture_default_str();
  app.add_option("--fit_gap_ev", cfg.fit_gap_ev, "pristine direct gap to fit")->capture_default_str();
  app.add_option("--fit_bandwidth_ev", cfg.fit_bandwidth_ev, "pristine valence bandwidth to fit")->capture_default_str();

  std::string out_path;
  app.add_option("--out", out_path, "write the report here instead of stdout");

  std::string defect_arg;
  std::vector<std::string> only;
  double strain = 0.0;
  double target_nm_val = 0.0;
  double target_ev = 0.0;
  std::string cal_species;
  double onsite_lo = -6.0, onsite_hi = 6.0, cal_tol_ev = 1e-3;

  auto* fit = app.add_subcommand("fit-params",
                                 "fit the hopping and onsite split to the pristine gap and bandwidth");
  fit->fallthrough();

  auto* bands = app.add_subcommand("bands", "band structure along G-M-K-G");
  bands->fallthrough();
  bands->add_option("--defect", defect_arg, "defect name from the definitions file, or an inline NAME CHARGE EDITS spec");
  bands->add_option("--strain", strain, "biaxial strain")->capture_default_str();

  auto* screen = app.add_subcommand("screen", "levels, spectra and transitions for the defect set");
  screen->fallthrough();
  screen->add_option("--only", only, "restrict to these defect names");
  screen->add_option("--strain", strain, "biaxial strain")->capture_default_str();

  auto* tune = app.add_subcommand("tune", "strain sweep, response fit and target solve for one defect");
  tune->fallthrough();
  tune->add_option("--defect", defect_arg, "defect name or inline spec")->required();
  auto* tune_target = tune->add_option("--target_nm", target_nm_val, "wavelength to reach");

  auto* match = app.add_subcommand("match", "pair the screened table with the quantum-technology targets");
  match->fallthrough();
  auto* match_target = match->add_option("--target_nm", target_nm_val, "match a single custom wavelength");

  auto* calibrate = app.add_subcommand("calibrate",
                                       "solve one dopant onsite so the defect hits a target transition energy");
  calibrate->fallthrough();
  calibrate->add_option("--defect", defect_arg, "defect name or inline spec")->required();
  calibrate->add_option("--target_ev", target_ev, "transition energy to reach")->required();
  calibrate->add_option("--species", cal_species, "dopant species to adjust (default: first introduced)");
  calibrate->add_option("--onsite_lo", onsite_lo, "onsite bracket lower end")->capture_default_str();
  calibrate->add_option("--onsite_hi", onsite_hi, "onsite bracket upper end")->capture_default_str();
  calibrate->add_option("--cal_tol_ev", cal_tol_ev, "energy tolerance")->capture_default_str();

  app.require_subcommand(0, 1);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  if (app.get_subcommands().empty()) {
    std::cout << app.help();
    return 2;
  }

  try {
    if (fit->parsed()) return cmd_fit_params(cfg, out_path);
    if (bands->parsed())
      return cmd_bands(cfg, defect_arg, strain, out_path, opt_params->count() > 0,
                       opt_cal->count() > 0);
    if (screen->parsed())
      return cmd_screen(cfg, only, strain, out_path, opt_params->count() > 0,
                        opt_cal->count() > 0);
    if (tune->parsed()) {
      std::optional<double> target;
      if (tune_target->count() > 0) target = target_nm_val;
      return cmd_tune(cfg, defect_arg, target, out_path, opt_params->count() > 0,
                      opt_cal->count() > 0);
    }
    if (match->parsed()) {
      std::optional<double> target;
      if (match_target->count() > 0) target = target_nm_val;
      return cmd_match(cfg, target, out_path);
    }
    if (calibrate->parsed())
      return cmd_calibrate(cfg, defect_arg, target_ev, cal_species, onsite_lo,
                           onsite_hi, cal_tol_ev, out_path, opt_params->count() > 0);
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

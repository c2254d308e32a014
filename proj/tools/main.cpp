// fcf: command-line front end for drive design, effective rates, Chern
// diagrams, drive optimization and Floquet validation.

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <numbers>
#include <string>
#include <vector>

#include <fcf/fcf.hpp>

namespace {

using namespace fcf;
namespace fs = std::filesystem;

constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

struct Common {
  std::string out = ".";
  unsigned threads = 0;
};

std::string out_path(const Common& c, const std::string& name) { return (fs::path(c.out) / name).string(); }

void prepare(const Common& c) {
  if (c.threads > 0) setenv("FCF_THREADS", std::to_string(c.threads).c_str(), 1);
  std::error_code ec;
  fs::create_directories(c.out, ec);
  if (!fs::is_directory(c.out)) throw ConfigError("output directory '" + c.out + "' is not usable");
}

/// Drive from a file path or inline JSON text (anything starting with '{').
DriveSpec load_drive(const std::string& arg) {
  const auto first = arg.find_first_not_of(" \t\n");
  if (first != std::string::npos && arg[first] == '{') return drive_from_json(parse_json(arg, "<inline>"));
  return drive_from_json(read_json_file(arg));
}

std::vector<double> parse_list(const std::string& text, const std::string& what) {
  std::vector<double> out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t comma = text.find(',', pos);
    const std::string item = text.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
    for (double v : parse_range(item, what)) out.push_back(v);
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  return out;
}

std::vector<DriveFamily> parse_families(const std::string& s) {
  if (s == "both") return {DriveFamily::plus, DriveFamily::minus};
  const DriveFamily f = parse_family(s, "--family");
  if (f == DriveFamily::custom) throw ConfigError("--family: optimizer needs plus, minus or both");
  return {f};
}

void emit(const std::string& path, const std::string& content, bool echo) {
  write_file(path, content);
  if (echo) std::cout << content;
}

// ------------------------------------------------------------------ rates

struct RatesArgs {
  std::string drive;
  double j0 = 1.0;
  double delta = 0.0;
};

void cmd_rates(const Common& c, const RatesArgs& a) {
  const DriveSpec spec = load_drive(a.drive);
  if (!(a.j0 > 0.0)) throw ConfigError("--j0 must be positive");
  const EffectiveRates r = effective_rates(spec, build_geometry(), a.j0);
  Json j;
  j["drive"] = drive_to_json(spec);
  j["rates"] = rates_to_json(r, a.delta);
  emit(out_path(c, "rates.json"), dump(j), true);
}

// ------------------------------------------------------------------ phase map

struct PhaseMapArgs {
  std::string A1 = "0:3.5:0.05";
  std::string A2 = "0:3.5:0.05";
  double delta2 = std::numbers::pi / 2.0;
  std::string family = "plus";
  bool svg = false;
};

void cmd_phase_map(const Common& c, const PhaseMapArgs& a) {
  const DriveFamily family = parse_family(a.family, "--family");
  if (family == DriveFamily::custom) throw ConfigError("--family: phase map needs plus or minus");
  const PhaseMap m = phase_map(parse_range(a.A1, "--A1"), parse_range(a.A2, "--A2"), a.delta2, family);

  CsvTable csv({"A1", "A2", "phi", "phi_defined", "j1_over_j0", "R"});
  std::vector<bool> bins(64, false);
  for (const auto& cell : m.cells) {
    csv.cell(cell.A1).cell(cell.A2).cell(cell.c.phi_defined ? cell.c.phi : std::nan(""));
    csv.cell(cell.c.phi_defined).cell(cell.c.j1_over_j0).cell(cell.c.R);
    if (cell.c.phi_defined) {
      const auto b = static_cast<std::size_t>(std::floor((cell.c.phi + std::numbers::pi) / (2 * std::numbers::pi) * 64));
      bins[std::min<std::size_t>(b, 63)] = true;
    }
  }
  write_file(out_path(c, "phase_map.csv"), csv.str());

  Json s;
  s["cells"] = m.cells.size();
  s["phi_bins_covered"] = std::count(bins.begin(), bins.end(), true);
  s["phi_bins_total"] = 64;
  s["components_j1_ge_0.25"] = count_superlevel_components(m, 0.25);
  s["components_j1_ge_0.5"] = count_superlevel_components(m, 0.5);
  emit(out_path(c, "phase_map_summary.json"), dump(s), true);

  if (a.svg) {
    SvgHeatmap svg(m.A1, m.A2, "A1/omega", "A2/omega");
    svg.fill([&](std::size_t i, std::size_t j) {
      const auto& cc = m.cell(i, j).c;
      return cc.phi_defined ? phase_color(cc.phi) : std::string("#808080");
    });
    auto j1 = [&](std::size_t i, std::size_t j) { return m.cell(i, j).c.j1_over_j0; };
    svg.contour(j1, 0.5, "white", true);
    svg.contour(j1, 0.25, "white", false);
    write_file(out_path(c, "phase_map.svg"), svg.str("phi of the NNN rate, delta2 = " + format_number(a.delta2)));
  }
}

// ------------------------------------------------------------------ chern diagram

struct ChernArgs {
  std::string phi = "-3.141592653589793:3.141592653589793:0.06544984694978735";
  std::string ratio = "-8:8:0.16666666666666666";
  std::size_t kgrid = 48;
  double j2_over_j1 = 0.2;
  std::string model = "both";
  bool svg = false;
};

void write_diagram(const Common& c, const ChernDiagram& d, const std::string& stem, bool svg_out) {
  CsvTable csv({"phi", "ratio", "chern", "min_gap", "indeterminate"});
  int counts[3] = {0, 0, 0};
  int indeterminate = 0;
  for (std::size_t ip = 0; ip < d.phis.size(); ++ip) {
    for (std::size_t ir = 0; ir < d.ratios.size(); ++ir) {
      const ChernResult& r = d.cell(ip, ir);
      csv.cell(d.phis[ip]).cell(d.ratios[ir]).cell(r.chern).cell(r.min_gap).cell(!r.determinate);
      if (!r.determinate) {
        ++indeterminate;
      } else if (r.chern >= -1 && r.chern <= 1) {
        ++counts[r.chern + 1];
      }
    }
  }
  write_file(out_path(c, stem + ".csv"), csv.str());

  if (svg_out) {
    SvgHeatmap svg(d.phis, d.ratios, "phi", "delta_eff / j2");
    svg.fill([&](std::size_t i, std::size_t j) {
      const ChernResult& r = d.cell(i, j);
      if (!r.determinate) return std::string("#b0b0b0");
      return r.chern > 0 ? std::string("#2b6cb0") : r.chern < 0 ? std::string("#ed8936") : std::string("#ffffff");
    });
    std::vector<std::array<double, 2>> up, dn;
    for (double phi : linspace(d.phis.front(), d.phis.back(), 400)) {
      if (d.kind == ModelKind::driven_hexagonal) {
        up.push_back({phi, -6.0 * std::cos(phi + 2.0 * std::numbers::pi / 3.0)});
        dn.push_back({phi, -6.0 * std::cos(phi - 2.0 * std::numbers::pi / 3.0)});
      } else {
        up.push_back({phi, 3.0 * std::sqrt(3.0) * std::sin(phi)});
        dn.push_back({phi, -3.0 * std::sqrt(3.0) * std::sin(phi)});
      }
    }
    svg.curve(up, "black");
    svg.curve(dn, "black");
    const std::string title = d.kind == ModelKind::driven_hexagonal ? "Chern number, driven hexagonal model"
                                                                     : "Chern number, Haldane reference model";
    write_file(out_path(c, stem + ".svg"), svg.str(title));
  }
  std::cout << "{\"model\": \"" << stem << "\", \"cells\": " << d.cells.size() << ", \"chern_-1\": " << counts[0]
            << ", \"chern_0\": " << counts[1] << ", \"chern_+1\": " << counts[2]
            << ", \"indeterminate\": " << indeterminate << "}\n";
}

void cmd_chern_diagram(const Common& c, const ChernArgs& a) {
  DiagramSettings s;
  s.phis = parse_range(a.phi, "--phi");
  s.ratios = parse_range(a.ratio, "--ratio");
  s.kgrid = a.kgrid;
  s.j2_over_j1 = a.j2_over_j1;
  if (s.kgrid < 12) throw ConfigError("--kgrid must be at least 12");
  const bool driven = a.model == "both" || a.model == "driven";
  const bool haldane = a.model == "both" || a.model == "haldane";
  if (!driven && !haldane) throw ConfigError("--model must be driven, haldane or both");
  if (driven) write_diagram(c, phase_diagram(ModelKind::driven_hexagonal, s), "chern_driven", a.svg);
  if (haldane) write_diagram(c, phase_diagram(ModelKind::haldane_reference, s), "chern_haldane", a.svg);
}

// ------------------------------------------------------------------ optimize / sweep

struct OptimizeArgs {
  double phi_target = std::numbers::pi / 2.0;
  std::string r_th = "0.25";
  std::string phis;
  std::size_t targets = 16;
  int N = 2;
  int starts = 64;
  std::uint64_t seed = 42;
  double amp_bound = 5.0;
  int max_iterations = 600;
  std::string family = "both";
  int refine = 4;
};

OptimizationProblem problem_from(const OptimizeArgs& a) {
  OptimizationProblem q;
  q.N = a.N;
  q.n_starts = a.starts;
  q.seed = a.seed;
  q.amp_bound = a.amp_bound;
  q.max_iterations = a.max_iterations;
  validate(q);
  return q;
}

CsvTable sweep_table(int N) {
  std::vector<std::string> header{"phi_target", "r_th", "R", "re_R_eiphi", "im_R_eiphi"};
  for (int n = 1; n <= N; ++n) header.push_back("A" + std::to_string(n));
  for (int n = 2; n <= N; ++n) header.push_back("delta" + std::to_string(n));
  for (const char* h : {"j1_over_j0", "phi_achieved", "feasible", "starts_converged", "family", "jump"}) {
    header.push_back(h);
  }
  return CsvTable(header);
}

void add_row(CsvTable& t, double phi, double r_th, const OptimizationResult& r, bool jump) {
  t.cell(phi).cell(r_th).cell(r.R_value).cell(r.R_value * std::cos(phi)).cell(r.R_value * std::sin(phi));
  for (double x : r.p_star) t.cell(x);
  t.cell(r.j1_over_j0).cell(r.phi_achieved).cell(r.feasible).cell(r.starts_converged);
  t.text(family_name(r.family)).cell(jump);
}

void cmd_optimize(const Common& c, const OptimizeArgs& a) {
  OptimizationProblem q = problem_from(a);
  q.phi_target = a.phi_target;
  q.r_threshold = parse_number(a.r_th, "--r-th");
  const OptimizationResult r = maximize_over(q, parse_families(a.family));
  CsvTable t = sweep_table(q.N);
  add_row(t, q.phi_target, q.r_threshold, r, false);
  emit(out_path(c, "optimize.csv"), t.str(), true);
}

void cmd_sweep(const Common& c, const OptimizeArgs& a) {
  const OptimizationProblem q = problem_from(a);
  std::vector<double> phis;
  if (!a.phis.empty()) {
    phis = parse_list(a.phis, "--phi");
  } else {
    if (a.targets < 1) throw ConfigError("--targets must be positive");
    for (std::size_t i = 0; i < a.targets; ++i) {
      phis.push_back(-std::numbers::pi + 2.0 * std::numbers::pi * double(i + 1) / double(a.targets));
    }
  }
  SweepOptions opt;
  opt.families = parse_families(a.family);
  opt.refine_levels = a.refine;
  const auto rows = sweep_targets(phis, parse_list(a.r_th, "--r-th"), q, opt);
  CsvTable t = sweep_table(q.N);
  for (const auto& row : rows) add_row(t, row.phi_target, row.r_threshold, row.result, row.jump_before);
  emit(out_path(c, "sweep.csv"), t.str(), true);
}

// ------------------------------------------------------------------ validate

struct ValidateArgs {
  std::string drive;
  double j0_over_omega = 0.02;
  double delta_over_j0 = 0.0;
  std::size_t kgrid = 24;
  std::size_t steps = 4096;
  bool richardson = false;
  std::string ladder;
  std::size_t chern_grid = 0;
};

void cmd_validate(const Common& c, const ValidateArgs& a) {
  const DriveSpec spec = load_drive(a.drive);
  if (!(a.j0_over_omega > 0.0)) throw ConfigError("--j0-over-omega must be positive");
  const double j0 = a.j0_over_omega * spec.omega;
  const double delta = a.delta_over_j0 * j0;
  PropagatorSettings ps;
  ps.steps_per_period = a.steps;
  ps.richardson_check = a.richardson;
  const LatticeGeometry geom = build_geometry();
  const QuasienergyReport rep = compare_effective(spec, geom, j0, delta, a.kgrid, ps);

  CsvTable t({"kx", "ky", "eps_exact_lo", "eps_exact_hi", "eps_eff_lo", "eps_eff_hi", "deviation", "pairing_flag"});
  for (const auto& p : rep.points) {
    t.cell(p.k.x()).cell(p.k.y()).cell(p.exact[0]).cell(p.exact[1]).cell(p.effective[0]).cell(p.effective[1]);
    t.cell(p.deviation).cell(p.ambiguous);
  }
  write_file(out_path(c, "validate.csv"), t.str());

  Json s;
  s["j0"] = j0;
  s["omega"] = spec.omega;
  s["delta"] = delta;
  s["kgrid"] = a.kgrid;
  s["steps_per_period"] = a.steps;
  s["max_deviation"] = rep.max_deviation;
  s["max_deviation_over_j0"] = rep.max_deviation / j0;
  s["mean_deviation"] = rep.mean_deviation;
  s["ambiguous_points"] = rep.ambiguous_points;
  s["max_unitarity_defect"] = rep.max_unitarity_defect;
  s["rates"] = rates_to_json(rep.rates, delta);
  if (!a.ladder.empty()) {
    const OmegaLadder lad = omega_ladder(spec, geom, j0, delta, a.kgrid, parse_list(a.ladder, "--ladder"), ps);
    s["ladder"] = {{"scales", lad.scales}, {"max_deviation", lad.max_deviation}, {"exponent", lad.exponent}};
  }
  if (a.chern_grid > 0) {
    const ChernResult fl = floquet_chern(spec, geom, j0, delta, a.chern_grid, ps);
    const ChernResult ef = chern_number(driven_model(rep.rates, delta, geom), a.chern_grid, a.chern_grid);
    auto out = [](const ChernResult& r) {
      return Json{{"chern", r.chern}, {"determinate", r.determinate}, {"min_gap", r.min_gap}, {"reason", r.reason}};
    };
    s["chern"] = {{"floquet", out(fl)}, {"effective", out(ef)}};
  }
  emit(out_path(c, "validate_summary.json"), dump(s), true);
}

void print_error(const char* kind, const std::string& message) {
  Json e;
  e["error"] = kind;
  e["message"] = message;
  std::cerr << e.dump() << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Floquet engineering of effective Chern bands on a driven hexagonal lattice"};
  app.require_subcommand(1);
  Common common;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--out", common.out, "output directory")->capture_default_str();
    sub->add_option("--threads", common.threads, "worker thread hint (default: FCF_THREADS or all cores)");
  };

  RatesArgs rates;
  auto* s_rates = app.add_subcommand("rates", "effective rates of a drive");
  s_rates->add_option("--drive", rates.drive, "drive JSON file or inline JSON")->required();
  s_rates->add_option("--j0", rates.j0, "bare tunneling j0")->capture_default_str();
  s_rates->add_option("--delta", rates.delta, "bare sublattice offset")->capture_default_str();
  add_common(s_rates);

  PhaseMapArgs pm;
  auto* s_pm = app.add_subcommand("phase-map", "phi and j1/j0 over an (A1, A2) grid");
  s_pm->add_option("--A1", pm.A1, "A1/omega range start:stop:step")->capture_default_str();
  s_pm->add_option("--A2", pm.A2, "A2/omega range start:stop:step")->capture_default_str();
  s_pm->add_option("--delta2", pm.delta2, "second-harmonic phase")->capture_default_str();
  s_pm->add_option("--family", pm.family, "plus or minus")->capture_default_str();
  s_pm->add_flag("--svg", pm.svg, "also write phase_map.svg");
  add_common(s_pm);

  ChernArgs ch;
  auto* s_ch = app.add_subcommand("chern-diagram", "Chern number over (phi, delta_eff/j2)");
  s_ch->add_option("--phi", ch.phi, "phi range")->capture_default_str();
  s_ch->add_option("--ratio", ch.ratio, "delta_eff/j2 range")->capture_default_str();
  s_ch->add_option("--kgrid", ch.kgrid, "Brillouin-zone grid per axis")->capture_default_str();
  s_ch->add_option("--j2-over-j1", ch.j2_over_j1, "NNN strength of the scan")->capture_default_str();
  s_ch->add_option("--model", ch.model, "driven, haldane or both")->capture_default_str();
  s_ch->add_flag("--svg", ch.svg, "also write SVG heatmaps");
  add_common(s_ch);

  OptimizeArgs opt;
  auto add_opt = [&](CLI::App* sub) {
    sub->add_option("--N", opt.N, "number of harmonics")->capture_default_str();
    sub->add_option("--starts", opt.starts, "multistart count")->capture_default_str();
    sub->add_option("--seed", opt.seed, "start-sequence seed")->capture_default_str();
    sub->add_option("--amp-bound", opt.amp_bound, "search box |A/omega|")->capture_default_str();
    sub->add_option("--max-iterations", opt.max_iterations, "simplex iterations per round")->capture_default_str();
    sub->add_option("--family", opt.family, "plus, minus or both")->capture_default_str();
    add_common(sub);
  };
  auto* s_opt = app.add_subcommand("optimize", "maximize R at one target phase");
  s_opt->add_option("--phi-target", opt.phi_target, "target phase")->capture_default_str();
  s_opt->add_option("--r-th", opt.r_th, "threshold on j1/j0")->capture_default_str();
  add_opt(s_opt);

  auto* s_sw = app.add_subcommand("sweep", "maximize R over a set of target phases");
  s_sw->add_option("--phi", opt.phis, "target phases: list or range (default: --targets uniform)");
  s_sw->add_option("--targets", opt.targets, "uniform targets -pi + 2 pi i / n, i = 1..n")->capture_default_str();
  s_sw->add_option("--r-th", opt.r_th, "thresholds: comma list")->capture_default_str();
  s_sw->add_option("--refine", opt.refine, "bisection levels confirming parameter jumps")->capture_default_str();
  add_opt(s_sw);

  ValidateArgs val;
  auto* s_val = app.add_subcommand("validate", "exact Floquet propagation against the effective model");
  s_val->add_option("--drive", val.drive, "drive JSON file or inline JSON")->required();
  s_val->add_option("--j0-over-omega", val.j0_over_omega, "j0 / omega")->capture_default_str();
  s_val->add_option("--delta-over-j0", val.delta_over_j0, "bare offset / j0")->capture_default_str();
  s_val->add_option("--kgrid", val.kgrid, "k-grid per axis")->capture_default_str();
  s_val->add_option("--steps", val.steps, "propagator steps per period")->capture_default_str();
  s_val->add_flag("--richardson", val.richardson, "verify each propagator at doubled steps");
  s_val->add_option("--ladder", val.ladder, "frequency scale factors, e.g. 1,2,4,8");
  s_val->add_option("--chern-grid", val.chern_grid, "also compare Floquet and effective Chern numbers");
  add_common(s_val);

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    print_error("config", e.what());
    return kExitConfig;
  }

  try {
    prepare(common);
    if (*s_rates) cmd_rates(common, rates);
    if (*s_pm) cmd_phase_map(common, pm);
    if (*s_ch) cmd_chern_diagram(common, ch);
    if (*s_opt) cmd_optimize(common, opt);
    if (*s_sw) cmd_sweep(common, opt);
    if (*s_val) cmd_validate(common, val);
  } catch (const ConfigError& e) {
    print_error("config", e.what());
    return kExitConfig;
  } catch (const NumericalError& e) {
    print_error("numerical", e.what());
    return kExitNumerical;
  } catch (const std::out_of_range& e) {
    print_error("config", e.what());
    return kExitConfig;
  }
  return 0;
}

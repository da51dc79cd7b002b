#include <algorithm>
#include <cstdio>
#include <functional>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "bulge/coefficients.hpp"
#include "bulge/errors.hpp"
#include "bulge/fitting.hpp"
#include "bulge/io.hpp"
#include "bulge/mixture.hpp"
#include "bulge/model.hpp"
#include "bulge/poisson.hpp"
#include "bulge/solver.hpp"
#include "bulge/units.hpp"
#include "bulge/version.hpp"

namespace {

using namespace bulge;

std::string g9(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    if (pos == std::string::npos) {
      out.push_back(s.substr(start));
      return out;
    }
    out.push_back(s.substr(start, pos - start));
    start = pos + 1;
  }
}

// "v1,v2,..." or "lo:hi:n" (linear spacing, n >= 2). `one` parses a single
// element and handles units.
std::vector<double> parse_list_or_range(
    const std::string& text, const std::function<double(const std::string&)>& one,
    const std::string& what) {
  require(!text.empty(), ErrorCode::InvalidArgument, what + " list is empty");
  if (text.find(':') != std::string::npos) {
    const auto parts = split(text, ':');
    require(parts.size() == 3, ErrorCode::InvalidArgument,
            what + " range must be <lo>:<hi>:<count>, got '" + text + "'");
    const double lo = one(parts[0]);
    const double hi = one(parts[1]);
    int n = 0;
    try {
      std::size_t used = 0;
      n = std::stoi(parts[2], &used);
      require(used == parts[2].size(), ErrorCode::InvalidArgument, "");
    } catch (...) {
      fail(ErrorCode::InvalidArgument,
           what + " range count must be an integer, got '" + parts[2] + "'");
    }
    require(n >= 2, ErrorCode::InvalidArgument, what + " range count must be >= 2");
    require(hi > lo, ErrorCode::InvalidArgument, what + " range must have hi > lo");
    std::vector<double> vals(n);
    for (int i = 0; i < n; ++i) vals[i] = lo + (hi - lo) * double(i) / (n - 1);
    return vals;
  }
  std::vector<double> vals;
  for (const auto& tok : split(text, ',')) {
    require(!tok.empty(), ErrorCode::InvalidArgument,
            what + " list has an empty element");
    vals.push_back(one(tok));
  }
  return vals;
}

double parse_plain(const std::string& s) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    require(used == s.size(), ErrorCode::InvalidArgument, "");
    return v;
  } catch (const Error&) {
    throw;
  } catch (...) {
    fail(ErrorCode::ParseError, "not a number: '" + s + "'");
  }
}

io::ReportFormat format_for_path(const std::string& path) {
  auto ends_with = [&](const char* suf) {
    const std::string s(suf);
    return path.size() >= s.size() && path.compare(path.size() - s.size(), s.size(), s) == 0;
  };
  if (ends_with(".txt") || ends_with(".text")) return io::ReportFormat::Text;
  return io::ReportFormat::Json;
}

// ------------------------------------------------------------------
// simulate
// ------------------------------------------------------------------

void run_simulate(const std::string& config_path, const std::string& pressures_arg,
                  const std::string& out_path, bool bending) {
  const io::ExperimentConfig cfg = io::load_experiment_config(config_path);
  require(cfg.material.has_value(), ErrorCode::InvalidArgument,
          config_path + ": simulate needs a material block in the config");

  std::vector<double> pressures = parse_list_or_range(
      pressures_arg, [](const std::string& s) { return units::parse_pressure(s); },
      "pressure");
  std::sort(pressures.begin(), pressures.end());
  for (std::size_t i = 0; i < pressures.size(); ++i) {
    require(std::isfinite(pressures[i]) && pressures[i] >= 0.0,
            ErrorCode::InvalidArgument, "pressures must be non-negative");
    require(i == 0 || pressures[i] > pressures[i - 1], ErrorCode::MonotonicityError,
            "duplicate pressure " + g9(pressures[i]) + " Pa in --pressures");
  }

  const ModelCoefficients model = model_coefficients(
      cfg.geometry, *cfg.material, bending, cfg.source, nullptr);
  std::vector<PressureDeflectionSample> samples;
  samples.reserve(pressures.size());
  for (double p : pressures) samples.push_back({p, forward_deflection(model, p)});

  const PressureDeflectionCurve curve(std::move(samples),
                                      cfg.label.empty() ? "simulated" : cfg.label);
  io::write_curve(curve, out_path, "Pa", "um");
  std::cout << "wrote " << curve.size() << " samples to " << out_path << "\n";
}

// ------------------------------------------------------------------
// fit
// ------------------------------------------------------------------

void run_fit(const std::string& curve_path, const std::string& config_path,
             std::optional<double> nu_override, const std::string& out_path) {
  const io::ExperimentConfig cfg = io::load_experiment_config(config_path);
  std::vector<std::string> notes;
  const PressureDeflectionCurve curve = io::parse_curve(curve_path, &notes);

  const double nu = nu_override.value_or(cfg.nu_assumed);
  std::optional<double> min_defl;
  if (cfg.min_deflection_over_t)
    min_defl = *cfg.min_deflection_over_t * cfg.geometry.thickness_t;

  FitResult fit = fit_curve(curve, cfg.geometry, nu, cfg.source, min_defl, nullptr);
  if (!cfg.label.empty()) fit.label = cfg.label;

  const UncertaintyResult unc = propagate_uncertainty(
      curve, cfg.geometry, nu, cfg.source, cfg.uncertainty, min_defl, nullptr);
  fit.u_sigma0 = unc.u_sigma0;
  fit.u_E = unc.u_E;

  io::Report report;
  report.seed = cfg.uncertainty.seed;
  if (cfg.lateral_uncertainty_defaulted)
    report.assumptions.push_back(io::kLateralDefaultNote);
  for (const auto& n : notes) report.assumptions.push_back(n);
  if (unc.n_failed > 0)
    report.assumptions.push_back(std::to_string(unc.n_failed) +
                                 " Monte-Carlo draws failed and were excluded");
  report.fits.push_back(fit);
  io::write_report(report, out_path, format_for_path(out_path));

  std::cout << "sigma0 (Pa) = " << g9(fit.sigma0) << " +- " << g9(fit.u_sigma0) << "\n"
            << "E (Pa) = " << g9(fit.youngs_modulus_E) << " +- " << g9(fit.u_E) << "\n"
            << "r_squared = " << g9(fit.r_squared) << "\n";
}

// ------------------------------------------------------------------
// poisson
// ------------------------------------------------------------------

void run_poisson(const std::string& square_path, const std::string& rect_path,
                 const std::string& out_path) {
  const io::Report rep_sq = io::read_report(square_path);
  const io::Report rep_re = io::read_report(rect_path);
  require(rep_sq.fits.size() == 1, ErrorCode::InvalidArgument,
          square_path + ": expected exactly one fit in the square report");
  require(rep_re.fits.size() == 1, ErrorCode::InvalidArgument,
          rect_path + ": expected exactly one fit in the rectangle report");
  const FitResult& fit_sq = rep_sq.fits[0];
  const FitResult& fit_re = rep_re.fits[0];

  UncertaintySpec spec;
  spec.seed = rep_sq.seed;

  const PoissonSolveReport result =
      solve_poisson(fit_sq, fit_re, fit_sq.coeffs.source, spec, nullptr);

  io::Report report;
  report.seed = spec.seed;
  report.poisson_results.push_back(result);
  io::write_report(report, out_path, format_for_path(out_path));

  std::cout << "nu = " << g9(result.nu) << " +- " << g9(result.delta_nu) << "\n";
  for (const auto& w : result.warnings) std::cout << "warning: " << w << "\n";
}

// ------------------------------------------------------------------
// mixture
// ------------------------------------------------------------------

void run_mixture(const std::string& mode_name, const std::string& composite_arg,
                 const std::vector<std::string>& layer_args,
                 const std::string& unknown_arg, const std::string& out_path) {
  const MixtureMode mode = mixture_mode_from_string(mode_name);
  const bool dimensionless = mode == MixtureMode::PoissonRatio;
  auto parse_value = [&](const std::string& s) {
    return dimensionless ? parse_plain(s) : units::parse_pressure(s);
  };

  const auto comp_parts = split(composite_arg, ':');
  require(comp_parts.size() <= 2 && !comp_parts[0].empty(), ErrorCode::InvalidArgument,
          "--composite must be <value>[:<uncertainty>], got '" + composite_arg + "'");
  UncertainValue composite{parse_value(comp_parts[0]),
                           comp_parts.size() == 2 ? parse_value(comp_parts[1]) : 0.0};

  std::vector<UncertainLayer> layers;
  for (const auto& arg : layer_args) {
    const auto parts = split(arg, ':');
    require(parts.size() == 3 || parts.size() == 4, ErrorCode::InvalidArgument,
            "--layer must be <name>:<thickness>:<value>[:<uncertainty>], got '" +
                arg + "'");
    UncertainLayer layer;
    layer.name = parts[0];
    layer.thickness = {units::parse_length(parts[1]), 0.0};
    layer.value = UncertainValue{parse_value(parts[2]),
                                 parts.size() == 4 ? parse_value(parts[3]) : 0.0};
    layers.push_back(std::move(layer));
  }

  const auto unk_parts = split(unknown_arg, ':');
  require(unk_parts.size() == 2, ErrorCode::InvalidArgument,
          "--unknown must be <name>:<thickness>, got '" + unknown_arg + "'");
  UncertainLayer unknown;
  unknown.name = unk_parts[0];
  unknown.thickness = {units::parse_length(unk_parts[1]), 0.0};
  layers.push_back(std::move(unknown));

  const MixtureResult result = decompose_with_uncertainty(composite, layers, mode);

  io::Report report;
  report.mixture_results.push_back(result);
  io::write_report(report, out_path, format_for_path(out_path));

  std::cout << unk_parts[0] << " " << to_string(mode) << " = " << g9(result.result.value)
            << " +- " << g9(result.result.u) << "\n";
  for (const auto& w : result.warnings) std::cout << "note: " << w << "\n";
}

// ------------------------------------------------------------------
// coeffs
// ------------------------------------------------------------------

int derived_grid_ny(int nx, double ratio) {
  int e = 2 * static_cast<int>(std::lround((nx - 1) * ratio / 4.0));
  e = std::max(e, nx - 1);  // never coarser in y than the x resolution
  return e + 1;
}

void run_coeffs(double ratio, double nu, const std::string& source_name,
                bool compute, int grid) {
  if (!compute) {
    const ShapeCoefficients c =
        coefficients_for(ratio, nu, coefficient_source_from_string(source_name));
    std::cout << "c1 = " << g9(c.c1) << "\n"
              << "f = " << g9(c.f_of_nu) << "\n"
              << "alpha = " << g9(c.alpha) << "\n"
              << "source = " << to_string(c.source) << "\n"
              << "aspect_ratio = " << g9(c.aspect_ratio) << "\n"
              << "nu_used = " << g9(c.nu_used) << "\n";
    return;
  }

  SolverConfig config;
  config.grid_nx = grid;
  config.grid_ny = derived_grid_ny(grid, ratio);
  const double a = 0.5e-3;
  const MembraneGeometry geom(a, ratio * a, 100e-9);
  const MaterialParams mat(220e9, nu, 50e6);
  const CoefficientExtraction ex = extract_coefficients(geom, mat, config);
  std::cout << "c1 = " << g9(ex.c1) << "\n"
            << "f = " << g9(ex.f) << "\n"
            << "alpha = " << g9(alpha_for(ratio)) << "\n"
            << "source = solver_derived\n"
            << "aspect_ratio = " << g9(ratio) << "\n"
            << "nu_used = " << g9(nu) << "\n"
            << "rel_residual = " << g9(ex.rel_residual) << "\n"
            << "grid = " << config.grid_nx << "x" << config.grid_ny << "\n";
}

// ------------------------------------------------------------------
// table
// ------------------------------------------------------------------

void run_table(const std::string& ratios_arg, const std::string& nus_arg,
               const std::string& out_path, bool verbose) {
  const auto ratios = parse_list_or_range(
      ratios_arg, [](const std::string& s) { return parse_plain(s); }, "ratio");
  const auto nus = parse_list_or_range(
      nus_arg, [](const std::string& s) { return parse_plain(s); }, "nu");

  SolverConfig config;  // defaults; grid_ny is derived per ratio internally
  TableProgress progress;
  if (verbose) {
    progress = [](double r, double nu, double c1, double f) {
      std::cerr << "ratio " << g9(r) << " nu " << g9(nu) << ": c1 = " << g9(c1)
                << ", f = " << g9(f) << "\n";
    };
  }
  const CoefficientTable table = build_coefficient_table(ratios, nus, config, progress);
  table.save_csv(out_path);
  std::cout << "wrote " << table.entries().size() << " entries to " << out_path << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"bulgekit: bulge-test analysis for submicron membranes"};
  app.set_version_flag("--version", std::string("bulgekit ") + kVersion);
  app.require_subcommand(1);

  // simulate
  auto* sim = app.add_subcommand("simulate", "Generate a synthetic load-deflection curve");
  std::string sim_config, sim_pressures, sim_out;
  bool sim_bending = false;
  sim->add_option("--config", sim_config, "Experiment config (JSON)")->required();
  sim->add_option("--pressures", sim_pressures,
                  "Pressures: 'p1,p2,...' or 'lo:hi:n' (units allowed, e.g. 1kPa)")
      ->required();
  sim->add_option("--out", sim_out, "Output curve CSV")->required();
  sim->add_flag("--bending", sim_bending, "Include the small-deflection bending term");
  sim->callback([&] { run_simulate(sim_config, sim_pressures, sim_out, sim_bending); });

  // fit
  auto* fit = app.add_subcommand("fit", "Fit a measured curve for sigma0 and E");
  std::string fit_curve_path, fit_config, fit_out;
  double fit_nu = 0.0;
  fit->add_option("--curve", fit_curve_path, "Curve CSV")->required();
  fit->add_option("--config", fit_config, "Experiment config (JSON)")->required();
  auto* fit_nu_opt = fit->add_option("--nu", fit_nu, "Override the assumed Poisson ratio");
  fit->add_option("--out", fit_out, "Output report (.json or .txt)")->required();
  fit->callback([&] {
    run_fit(fit_curve_path, fit_config,
            fit_nu_opt->count() ? std::optional<double>(fit_nu) : std::nullopt, fit_out);
  });

  // poisson
  auto* poi = app.add_subcommand("poisson",
                                 "Extract nu from a square + rectangle fit pair");
  std::string poi_square, poi_rect, poi_out;
  poi->add_option("--square", poi_square, "Fit report (JSON) of the square membrane")
      ->required();
  poi->add_option("--rect", poi_rect, "Fit report (JSON) of the rectangular membrane")
      ->required();
  poi->add_option("--out", poi_out, "Output report (.json or .txt)")->required();
  poi->callback([&] { run_poisson(poi_square, poi_rect, poi_out); });

  // mixture
  auto* mix = app.add_subcommand("mixture",
                                 "Recover an unknown layer's property in a stack");
  std::string mix_mode, mix_composite, mix_unknown, mix_out;
  std::vector<std::string> mix_layers;
  mix->add_option("--mode", mix_mode,
                  "biaxial_modulus | residual_stress | youngs_modulus | poisson_ratio")
      ->required();
  mix->add_option("--composite", mix_composite, "Composite value, <value>[:<u>]")
      ->required();
  mix->add_option("--layer", mix_layers,
                  "Known layer <name>:<thickness>:<value>[:<u>] (repeatable)");
  mix->add_option("--unknown", mix_unknown, "Unknown layer <name>:<thickness>")
      ->required();
  mix->add_option("--out", mix_out, "Output report (.json or .txt)")->required();
  mix->callback([&] {
    run_mixture(mix_mode, mix_composite, mix_layers, mix_unknown, mix_out);
  });

  // coeffs
  auto* cof = app.add_subcommand("coeffs", "Shape coefficients (C1, f, alpha)");
  double cof_ratio = 0.0, cof_nu = 0.0;
  std::string cof_source = "vlassak_nix";
  bool cof_compute = false;
  int cof_grid = 65;
  cof->add_option("--ratio", cof_ratio, "Aspect ratio b/a (>= 1)")->required();
  cof->add_option("--nu", cof_nu, "Poisson ratio")->required();
  cof->add_option("--source", cof_source,
                  "vlassak_nix | bonnotte | maier_schneider | solver_derived");
  cof->add_flag("--compute", cof_compute, "Recompute with the membrane solver");
  cof->add_option("--grid", cof_grid, "Solver x-resolution (odd, >= 17)");
  cof->callback([&] { run_coeffs(cof_ratio, cof_nu, cof_source, cof_compute, cof_grid); });

  // table
  auto* tab = app.add_subcommand("table", "Regenerate the coefficient table CSV");
  std::string tab_ratios = "1.0:5.0:17", tab_nus = "0.0:0.45:10", tab_out;
  bool tab_verbose = false;
  tab->add_option("--ratios", tab_ratios, "Aspect ratios: list or lo:hi:n");
  tab->add_option("--nus", tab_nus, "Poisson ratios: list or lo:hi:n");
  tab->add_option("--out", tab_out, "Output CSV")->required();
  tab->add_flag("--verbose", tab_verbose, "Print per-entry progress to stderr");
  tab->callback([&] { run_table(tab_ratios, tab_nus, tab_out, tab_verbose); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const bulge::Error& e) {
    std::cerr << "error[" << e.code_name() << "]: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error[Internal]: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

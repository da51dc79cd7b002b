#include "property_suites.hpp"

#include <cmath>
#include <cstdio>
#include <optional>
#include <string>
#include <vector>

#include "bulge/coefficients.hpp"
#include "bulge/errors.hpp"
#include "bulge/fitting.hpp"
#include "bulge/mixture.hpp"
#include "bulge/model.hpp"
#include "bulge/poisson.hpp"
#include "bulge/random.hpp"
#include "bulge/solver.hpp"
#include "test_oracles.hpp"

namespace testsupport {
namespace {

using bulge::CoefficientSource;
using bulge::MaterialParams;
using bulge::MembraneGeometry;
using bulge::RandomStream;

struct Recorder {
  SuiteResult res;

  void ok() { ++res.cases; }
  void bad(int idx, const std::string& msg) {
    ++res.cases;
    ++res.failures;
    if (res.first_failure.empty())
      res.first_failure = "case " + std::to_string(idx) + ": " + msg;
  }
};

double log_uniform(RandomStream& rng, double lo, double hi) {
  return std::exp(rng.uniform(std::log(lo), std::log(hi)));
}

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

bool close_rel(double x, double ref, double rel) {
  return std::abs(x - ref) <= rel * std::abs(ref);
}

std::uint64_t derive_seed(RandomStream& rng) {
  return static_cast<std::uint64_t>(rng.uniform() * 9.0e15) + 1;
}

}  // namespace

SuiteResult prop_forward_inverse_round_trip(int cases, std::uint64_t seed) {
  RandomStream rng(seed);
  Recorder rec;
  for (int i = 0; i < cases; ++i) {
    try {
      double ratio = 1.0;
      CoefficientSource source = CoefficientSource::VlassakNix;
      switch (i % 5) {
        case 0: break;
        case 1: source = CoefficientSource::MaierSchneider; break;
        case 2: source = CoefficientSource::Bonnotte; break;
        case 3: ratio = rng.uniform(4.2, 14.0); break;
        case 4: ratio = 2.0; source = CoefficientSource::Bonnotte; break;
      }
      const double a = log_uniform(rng, 5e-5, 2e-3);
      const double t = log_uniform(rng, 2e-8, std::min(1e-6, a / 100.0));
      const double E = rng.uniform(2e10, 5e11);
      const double sigma0 = log_uniform(rng, 1e6, 8e8);
      const double nu = rng.uniform(0.0, 0.45);
      const MembraneGeometry geom(a, ratio * a, t);
      const MaterialParams mat(E, nu, sigma0);

      // pointwise inverse, with and without the bending term
      const bool bending = (i % 2) == 0;
      const double h_probe = t * log_uniform(rng, 0.5, 300.0);
      const double p_probe =
          bulge::forward_pressure(geom, mat, h_probe, bending, source);
      const double h_back =
          bulge::forward_deflection(geom, mat, p_probe, bending, source);
      if (!close_rel(h_back, h_probe, 1e-9)) {
        rec.bad(i, "deflection round trip: h=" + num(h_probe) + " came back as " +
                       num(h_back));
        continue;
      }

      // curve-level inverse: refit a noise-free sweep
      const auto curve = synthetic_curve(geom, mat, source, 12, 12.0, 300.0);
      const auto fit = bulge::fit_curve(curve, geom, nu, source);
      if (!close_rel(fit.sigma0, sigma0, 1e-8)) {
        rec.bad(i, "sigma0 " + num(sigma0) + " refit as " + num(fit.sigma0));
        continue;
      }
      if (!close_rel(fit.youngs_modulus_E, E, 1e-8)) {
        rec.bad(i, "E " + num(E) + " refit as " + num(fit.youngs_modulus_E));
        continue;
      }
      if (!(fit.r_squared >= 1.0 - 1e-9)) {
        rec.bad(i, "noise-free fit has r^2 = " + num(fit.r_squared));
        continue;
      }
      rec.ok();
    } catch (const std::exception& e) {
      rec.bad(i, std::string("unexpected exception: ") + e.what());
    }
  }
  return rec.res;
}

SuiteResult prop_compose_decompose_identity(int cases, std::uint64_t seed) {
  RandomStream rng(seed);
  Recorder rec;
  for (int i = 0; i < cases; ++i) {
    try {
      const int n_layers = 2 + static_cast<int>(rng.uniform(0.0, 4.0));
      std::vector<double> thickness(n_layers), value(n_layers);
      for (int k = 0; k < n_layers; ++k) {
        thickness[k] = log_uniform(rng, 1e-8, 2e-6);
        switch (i % 3) {
          case 0: value[k] = log_uniform(rng, 1e9, 5e11); break;
          case 1:
            value[k] = (rng.uniform() < 0.5 ? -1.0 : 1.0) *
                       log_uniform(rng, 1e5, 1e9);
            break;
          default: value[k] = rng.uniform(-0.45, 0.49); break;
        }
      }
      std::vector<bulge::StackLayer> layers;
      double t_total = 0.0;
      for (int k = 0; k < n_layers; ++k) {
        layers.push_back({"L" + std::to_string(k), thickness[k], value[k]});
        t_total += thickness[k];
      }
      const double composite = bulge::compose(bulge::LayerStack(layers));

      const int unknown = static_cast<int>(rng.uniform(0.0, double(n_layers)));
      auto holed = layers;
      holed[unknown].value = std::nullopt;
      const double recovered =
          bulge::decompose_unknown(composite, bulge::LayerStack(holed));

      // cancellation-aware bound: the subtraction magnifies roundoff by the
      // ratio of the summed magnitudes to the unknown layer's share
      double mass = t_total * std::abs(composite);
      for (int k = 0; k < n_layers; ++k)
        if (k != unknown) mass += thickness[k] * std::abs(value[k]);
      const double tol = 1e-12 * (mass / thickness[unknown] + std::abs(value[unknown]));
      if (!(std::abs(recovered - value[unknown]) <= tol)) {
        rec.bad(i, "layer value " + num(value[unknown]) + " decomposed as " +
                       num(recovered));
        continue;
      }

      auto refilled = layers;
      refilled[unknown].value = recovered;
      const double recomposed = bulge::compose(bulge::LayerStack(refilled));
      double scale_c = std::abs(composite);
      for (int k = 0; k < n_layers; ++k)
        scale_c += thickness[k] * std::abs(value[k]) / t_total;
      if (!(std::abs(recomposed - composite) <= 1e-12 * scale_c)) {
        rec.bad(i, "composite " + num(composite) + " recomposed as " +
                       num(recomposed));
        continue;
      }
      rec.ok();
    } catch (const std::exception& e) {
      rec.bad(i, std::string("unexpected exception: ") + e.what());
    }
  }
  return rec.res;
}

SuiteResult prop_nu_ratio_invariance(int cases, std::uint64_t seed) {
  RandomStream rng(seed);
  Recorder rec;
  for (int i = 0; i < cases; ++i) {
    try {
      const double nu_true = rng.uniform(0.02, 0.44);
      const double a_s = log_uniform(rng, 1e-4, 2e-3);
      const double a_r = log_uniform(rng, 1e-4, 2e-3);
      const double ratio_r = rng.uniform(4.2, 14.0);
      const double t = log_uniform(rng, 2e-8, 5e-7);
      const double E = rng.uniform(5e10, 4e11);
      const double sigma0 = log_uniform(rng, 5e6, 5e8);

      bulge::UncertaintySpec spec;
      spec.n_samples = 100;
      spec.seed = derive_seed(rng);

      const auto solve_at = [&](double t_used, double e_used) {
        const MembraneGeometry gs(a_s, a_s, t_used);
        const MembraneGeometry gr(a_r, ratio_r * a_r, t_used);
        const auto [fs, fr] = synthetic_fit_pair(nu_true, gs, gr, e_used, sigma0,
                                                 CoefficientSource::VlassakNix);
        return bulge::solve_poisson(fs, fr, CoefficientSource::VlassakNix, spec);
      };

      const auto rep1 = solve_at(t, E);
      if (!(std::abs(rep1.nu - nu_true) <= 1e-5)) {
        rec.bad(i, "nu_true " + num(nu_true) + " recovered as " + num(rep1.nu));
        continue;
      }
      if (!(std::abs(rep1.delta_nu) <= 1e-12)) {
        rec.bad(i, "exact geometry still reported delta_nu = " + num(rep1.delta_nu));
        continue;
      }

      const double t2 = t * log_uniform(rng, 0.25, 4.0);
      const double e2 = E * log_uniform(rng, 0.25, 2.5);
      const auto rep2 = solve_at(t2, e2);
      if (!(std::abs(rep2.nu - rep1.nu) <= 2e-6)) {
        rec.bad(i, "nu moved from " + num(rep1.nu) + " to " + num(rep2.nu) +
                       " under a thickness/modulus rescale");
        continue;
      }
      rec.ok();
    } catch (const std::exception& e) {
      rec.bad(i, std::string("unexpected exception: ") + e.what());
    }
  }
  return rec.res;
}

SuiteResult prop_regression_cross_check(int cases, std::uint64_t seed) {
  RandomStream rng(seed);
  Recorder rec;
  for (int i = 0; i < cases; ++i) {
    try {
      const int n = 3 + static_cast<int>(rng.uniform(0.0, 48.0));
      const double x0 = rng.uniform(-100.0, 100.0);
      const double spread = log_uniform(rng, 0.1, 100.0);
      const double slope_true = rng.uniform(-1e3, 1e3);
      const double intercept_true = rng.uniform(-1e3, 1e3);

      std::vector<bulge::LinearizedPoint> pts(static_cast<std::size_t>(n));
      double y_scale = 0.0;
      for (int k = 0; k < n; ++k) {
        const double x = x0 + spread * (double(k) / (n - 1)) +
                         0.01 * spread * rng.uniform(-1.0, 1.0);
        const double y = intercept_true + slope_true * x +
                         0.01 * (std::abs(slope_true) * spread + 1.0) *
                             rng.uniform(-1.0, 1.0);
        pts[static_cast<std::size_t>(k)] = {x, y};
        y_scale = std::max(y_scale, std::abs(y));
      }

      const auto fit = bulge::fit_line(pts);
      const auto [int_ld, slope_ld] = fit_line_normal_equations(pts);

      const double tol_slope = 1e-9 * (std::abs(slope_ld) + y_scale / spread);
      const double tol_int = 1e-9 * (std::abs(int_ld) + y_scale);
      if (!(std::abs(fit.slope - slope_ld) <= tol_slope)) {
        rec.bad(i, "slope " + num(fit.slope) + " vs reference " + num(slope_ld));
        continue;
      }
      if (!(std::abs(fit.intercept - int_ld) <= tol_int)) {
        rec.bad(i, "intercept " + num(fit.intercept) + " vs reference " +
                       num(int_ld));
        continue;
      }
      rec.ok();
    } catch (const std::exception& e) {
      rec.bad(i, std::string("unexpected exception: ") + e.what());
    }
  }
  return rec.res;
}

SuiteResult prop_solver_energy_symmetry(int cases, std::uint64_t seed) {
  RandomStream rng(seed);
  Recorder rec;
  for (int i = 0; i < cases; ++i) {
    try {
      const double a = log_uniform(rng, 2e-4, 1e-3);
      const double t = log_uniform(rng, 5e-8, 3e-7);
      const double E = rng.uniform(5e10, 4e11);
      const double sigma0 = log_uniform(rng, 5e6, 5e8);
      const double nu = rng.uniform(0.0, 0.45);
      const MembraneGeometry geom(a, a, t);
      const MaterialParams mat(E, nu, sigma0);

      const double h_target = t * log_uniform(rng, 0.3, 100.0);
      const auto shape = bulge::coefficients_for(1.0, nu, CoefficientSource::VlassakNix);
      const double A = shape.c1 * t * sigma0 / (a * a);
      const double B = shape.f_of_nu * t * E / ((1.0 - nu) * a * a * a * a);
      const double pressure = A * h_target + B * h_target * h_target * h_target;

      bulge::SolverConfig cfg;
      cfg.grid_nx = cfg.grid_ny = 17;
      cfg.gradient_tolerance = 1e-5;
      cfg.record_energy_trace = true;
      cfg.symmetry_reduction = (i % 4 != 0);

      const auto field = bulge::solve_membrane(geom, mat, pressure, cfg);
      if (!field.converged) {
        rec.bad(i, "solve did not converge (residual " + num(field.residual_norm) + ")");
        continue;
      }

      const auto& trace = field.energy_trace;
      double e_scale = 0.0;
      for (const double e : trace) e_scale = std::max(e_scale, std::abs(e));
      bool monotone = true;
      for (std::size_t k = 1; k < trace.size(); ++k) {
        if (trace[k] > trace[k - 1] + 1e-12 * e_scale) {
          rec.bad(i, "energy rose from " + num(trace[k - 1]) + " to " +
                         num(trace[k]) + " at step " + std::to_string(k));
          monotone = false;
          break;
        }
      }
      if (!monotone) continue;

      const int n = 17;
      const auto& w = field.w;
      const auto& u = field.u;
      const auto& v = field.v;
      const double wmax = w.abs().maxCoeff();
      const double umax = std::max(u.abs().maxCoeff(), 1e-9 * wmax);
      double asym_w = 0.0, asym_u = 0.0;
      for (int ix = 0; ix < n; ++ix) {
        for (int jy = 0; jy < n; ++jy) {
          asym_w = std::max({asym_w, std::abs(w(ix, jy) - w(n - 1 - ix, jy)),
                             std::abs(w(ix, jy) - w(ix, n - 1 - jy)),
                             std::abs(w(ix, jy) - w(jy, ix))});
          asym_u = std::max({asym_u, std::abs(u(ix, jy) + u(n - 1 - ix, jy)),
                             std::abs(u(ix, jy) - u(ix, n - 1 - jy)),
                             std::abs(u(ix, jy) - v(jy, ix))});
        }
      }
      // documented invariant is 1e-8 relative; measured asymmetry sits below
      // 1e-9 over 1000 cases, so this has an order of magnitude in hand
      const double sym_tol = 1e-8;
      if (!(asym_w <= sym_tol * wmax)) {
        rec.bad(i, "w asymmetry " + num(asym_w) + " vs scale " + num(wmax));
        continue;
      }
      if (!(asym_u <= sym_tol * umax)) {
        rec.bad(i, "in-plane asymmetry " + num(asym_u) + " vs scale " + num(umax));
        continue;
      }

      const double h_solved = field.center_deflection();
      if (!(std::abs(h_solved / h_target - 1.0) <= 0.35)) {
        rec.bad(i, "centre deflection " + num(h_solved) + " far from target " +
                       num(h_target));
        continue;
      }
      rec.ok();
    } catch (const std::exception& e) {
      rec.bad(i, std::string("unexpected exception: ") + e.what());
    }
  }
  return rec.res;
}

SuiteResult prop_fixed_seed_determinism(int cases, std::uint64_t seed) {
  RandomStream rng(seed);
  Recorder rec;
  for (int i = 0; i < cases; ++i) {
    try {
      bulge::UncertaintySpec spec;
      spec.n_samples = 100;
      spec.seed = derive_seed(rng);

      if (i % 3 == 0) {
        const double a = log_uniform(rng, 1e-4, 2e-3);
        const double t = log_uniform(rng, 5e-8, 5e-7);
        const MembraneGeometry geom(a, a, t, rng.uniform(0.001, 0.01) * a,
                                    rng.uniform(0.001, 0.01) * a,
                                    rng.uniform(0.002, 0.02) * t);
        const MaterialParams mat(rng.uniform(5e10, 4e11), rng.uniform(0.0, 0.45),
                                 log_uniform(rng, 1e7, 5e8));
        const auto curve = synthetic_curve(geom, mat, CoefficientSource::VlassakNix,
                                           10, 12.0, 250.0);
        const auto r1 = bulge::propagate_uncertainty(
            curve, geom, mat.poisson_nu, CoefficientSource::VlassakNix, spec);
        const auto r2 = bulge::propagate_uncertainty(
            curve, geom, mat.poisson_nu, CoefficientSource::VlassakNix, spec);
        if (r1.u_sigma0 != r2.u_sigma0 || r1.u_E != r2.u_E ||
            r1.n_failed != r2.n_failed) {
          rec.bad(i, "fit uncertainty not reproducible: u_sigma0 " +
                         num(r1.u_sigma0) + " vs " + num(r2.u_sigma0));
          continue;
        }
        if (!(r1.u_sigma0 > 0.0 && r1.u_E > 0.0)) {
          rec.bad(i, "perturbed geometry produced zero spread");
          continue;
        }
      } else if (i % 3 == 1) {
        const double nu_true = rng.uniform(0.05, 0.4);
        const double a_s = log_uniform(rng, 2e-4, 1e-3);
        const double a_r = log_uniform(rng, 2e-4, 1e-3);
        const double t = log_uniform(rng, 5e-8, 5e-7);
        const MembraneGeometry gs(a_s, a_s, t, 0.01 * a_s, 0.01 * a_s);
        const MembraneGeometry gr(a_r, 8.0 * a_r, t, 0.01 * a_r, 0.08 * a_r);
        const auto [fs, fr] =
            synthetic_fit_pair(nu_true, gs, gr, rng.uniform(5e10, 4e11),
                               log_uniform(rng, 1e7, 5e8),
                               CoefficientSource::VlassakNix);
        // extreme draws can push nu outside the physical bracket; when more
        // than 10% do, solve_poisson throws. That outcome must reproduce
        // just as exactly as a numeric result.
        std::optional<bulge::PoissonSolveReport> s1, s2;
        std::string err1, err2;
        try {
          s1 = bulge::solve_poisson(fs, fr, CoefficientSource::VlassakNix, spec);
        } catch (const bulge::Error& e) {
          err1 = e.what();
        }
        try {
          s2 = bulge::solve_poisson(fs, fr, CoefficientSource::VlassakNix, spec);
        } catch (const bulge::Error& e) {
          err2 = e.what();
        }
        if (s1.has_value() != s2.has_value() || err1 != err2) {
          rec.bad(i, "poisson outcome not reproducible: '" + err1 + "' vs '" +
                         err2 + "'");
          continue;
        }
        if (s1) {
          if (s1->nu != s2->nu || s1->delta_nu != s2->delta_nu ||
              s1->n_failed_draws != s2->n_failed_draws) {
            rec.bad(i, "poisson solve not reproducible: delta_nu " +
                           num(s1->delta_nu) + " vs " + num(s2->delta_nu));
            continue;
          }
          if (!(s1->delta_nu > 0.0)) {
            rec.bad(i, "lateral perturbation produced zero delta_nu");
            continue;
          }
        }
      } else {
        const int n_layers = 2 + static_cast<int>(rng.uniform(0.0, 3.0));
        std::vector<bulge::UncertainLayer> layers;
        std::vector<double> values(n_layers);
        double t_total = 0.0, mix = 0.0;
        for (int k = 0; k < n_layers; ++k) {
          const double tk = log_uniform(rng, 2e-8, 5e-7);
          values[k] = log_uniform(rng, 2e10, 5e11);
          layers.push_back({"L" + std::to_string(k),
                            {tk, 0.02 * tk},
                            bulge::UncertainValue{values[k], 0.01 * values[k]}});
          t_total += tk;
          mix += tk * values[k];
        }
        const int unknown = static_cast<int>(rng.uniform(0.0, double(n_layers)));
        layers[static_cast<std::size_t>(unknown)].value.reset();
        const bulge::UncertainValue composite{mix / t_total,
                                              0.01 * std::abs(mix / t_total)};
        const auto r1 = bulge::decompose_with_uncertainty(
            composite, layers, bulge::MixtureMode::BiaxialModulus, spec);
        const auto r2 = bulge::decompose_with_uncertainty(
            composite, layers, bulge::MixtureMode::BiaxialModulus, spec);
        if (r1.result.value != r2.result.value || r1.result.u != r2.result.u ||
            r1.n_failed_draws != r2.n_failed_draws) {
          rec.bad(i, "mixture decomposition not reproducible: u " +
                         num(r1.result.u) + " vs " + num(r2.result.u));
          continue;
        }
        if (!(r1.result.u > 0.0)) {
          rec.bad(i, "perturbed stack produced zero spread");
          continue;
        }
      }
      rec.ok();
    } catch (const std::exception& e) {
      rec.bad(i, std::string("unexpected exception: ") + e.what());
    }
  }
  return rec.res;
}

}  // namespace testsupport

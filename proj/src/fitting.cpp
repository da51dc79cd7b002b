#include "bulge/fitting.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "bulge/errors.hpp"
#include "bulge/random.hpp"

namespace bulge {

std::vector<LinearizedPoint> linearize(const PressureDeflectionCurve& curve,
                                       double min_deflection) {
  require(std::isfinite(min_deflection) && min_deflection >= 0.0,
          ErrorCode::InvalidArgument, "min_deflection must be >= 0");
  std::vector<LinearizedPoint> points;
  points.reserve(curve.samples.size());
  for (const auto& s : curve.samples) {
    if (s.deflection > min_deflection && s.deflection > 0.0) {
      points.push_back({s.deflection * s.deflection, s.pressure / s.deflection});
    }
  }
  require(points.size() >= 3, ErrorCode::TooFewPoints,
          "need at least 3 samples above min_deflection, got " +
              std::to_string(points.size()));
  return points;
}

LineFit fit_line(const std::vector<LinearizedPoint>& points) {
  require(points.size() >= 3, ErrorCode::TooFewPoints,
          "need at least 3 points for a line fit");

  const auto n = static_cast<Eigen::Index>(points.size());
  Eigen::VectorXd x(n), y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    x[i] = points[static_cast<std::size_t>(i)].x;
    y[i] = points[static_cast<std::size_t>(i)].y;
  }

  const double x_mean = x.mean();
  const double sxx = (x.array() - x_mean).square().sum();
  const double x_scale = x.array().square().sum();
  require(sxx > 0.0 && sxx > 1e-28 * x_scale, ErrorCode::DegenerateAbscissa,
          "all h^2 values are (numerically) identical; cannot fit a slope");

  const auto [intercept, slope] = fit_line(x, y);

  const double ss_res = (y.array() - intercept - slope * x.array()).square().sum();
  const double ss_tot = (y.array() - y.mean()).square().sum();
  // A flat response has ss_tot == 0 and, for least squares, ss_res == 0 too;
  // the fit is then exact and r^2 is 1 by convention.
  const double r2 = ss_tot > 0.0 ? std::clamp(1.0 - ss_res / ss_tot, 0.0, 1.0) : 1.0;
  return {intercept, slope, r2};
}

FitResult extract_parameters(double intercept_A, double slope_B,
                             const MembraneGeometry& geometry, double nu_assumed,
                             CoefficientSource source, const CoefficientTable* table) {
  require(std::isfinite(intercept_A) && intercept_A > 0.0, ErrorCode::NonMonotoneModel,
          "fitted intercept A must be > 0 (film in tension)");
  require(std::isfinite(slope_B) && slope_B > 0.0, ErrorCode::NonMonotoneModel,
          "fitted slope B must be > 0");
  require(std::isfinite(nu_assumed) && nu_assumed > -1.0 && nu_assumed < 0.5,
          ErrorCode::InvalidArgument, "nu_assumed must lie in (-1, 0.5)");

  const ShapeCoefficients shape =
      coefficients_for(geometry.aspect_ratio(), nu_assumed, source, table);

  const double a = geometry.half_width_a;
  const double t = geometry.thickness_t;
  const double sigma0 = sigma0_from_intercept(intercept_A, a, shape.c1, t);
  const double biaxial = biaxial_from_slope(slope_B, a, shape.f_of_nu, t);

  return FitResult{intercept_A,
                   slope_B,
                   sigma0,
                   biaxial,
                   (1.0 - nu_assumed) * biaxial,
                   nu_assumed,
                   0.0,
                   0.0,
                   0.0,
                   geometry,
                   shape,
                   ""};
}

FitResult fit_curve(const PressureDeflectionCurve& curve,
                    const MembraneGeometry& geometry, double nu_assumed,
                    CoefficientSource source, std::optional<double> min_deflection,
                    const CoefficientTable* table) {
  const double h_min = min_deflection.value_or(10.0 * geometry.thickness_t);
  const auto points = linearize(curve, h_min);
  const LineFit line = fit_line(points);
  FitResult result =
      extract_parameters(line.intercept, line.slope, geometry, nu_assumed, source, table);
  result.r_squared = line.r_squared;
  result.label = curve.label;
  return result;
}

UncertaintyResult propagate_uncertainty(const PressureDeflectionCurve& curve,
                                        const MembraneGeometry& geometry,
                                        double nu_assumed, CoefficientSource source,
                                        const UncertaintySpec& spec,
                                        std::optional<double> min_deflection,
                                        const CoefficientTable* table) {
  require(spec.n_samples >= 100, ErrorCode::InvalidArgument,
          "n_samples must be >= 100");

  RandomStream rng(spec.seed);
  std::vector<double> sigma0_draws, e_draws;
  sigma0_draws.reserve(static_cast<std::size_t>(spec.n_samples));
  e_draws.reserve(static_cast<std::size_t>(spec.n_samples));
  int failed = 0;

  for (int draw = 0; draw < spec.n_samples; ++draw) {
    // Fixed draw order (a, b, t) keeps the stream alignment stable.
    const std::optional<double> a =
        spec.perturb_a
            ? rng.truncated_gaussian(geometry.half_width_a, geometry.sigma_a, 4.0, true)
            : std::optional<double>(geometry.half_width_a);
    const std::optional<double> b =
        spec.perturb_b
            ? rng.truncated_gaussian(geometry.half_length_b, geometry.sigma_b, 4.0, true)
            : std::optional<double>(geometry.half_length_b);
    const std::optional<double> t =
        spec.perturb_t
            ? rng.truncated_gaussian(geometry.thickness_t, geometry.sigma_t, 4.0, true)
            : std::optional<double>(geometry.thickness_t);
    if (!a || !b || !t) {
      ++failed;
      continue;
    }
    try {
      const MembraneGeometry perturbed(*a, *b, *t);
      const FitResult fit =
          fit_curve(curve, perturbed, nu_assumed, source, min_deflection, table);
      sigma0_draws.push_back(fit.sigma0);
      e_draws.push_back(fit.youngs_modulus_E);
    } catch (const Error&) {
      ++failed;
    }
  }

  require(failed <= spec.n_samples / 10, ErrorCode::MonteCarloFailure,
          std::to_string(failed) + " of " + std::to_string(spec.n_samples) +
              " Monte-Carlo draws failed");

  const auto sample_std = [](const std::vector<double>& v) {
    if (v.size() < 2) return 0.0;
    const double n = static_cast<double>(v.size());
    double mean = 0.0;
    for (const double x : v) mean += x;
    mean /= n;
    double ss = 0.0;
    for (const double x : v) ss += (x - mean) * (x - mean);
    return std::sqrt(ss / (n - 1.0));
  };

  return {sample_std(sigma0_draws), sample_std(e_draws), failed};
}

}  // namespace bulge

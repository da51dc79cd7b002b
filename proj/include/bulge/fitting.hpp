#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "bulge/coefficients.hpp"
#include "bulge/curve.hpp"
#include "bulge/geometry.hpp"

namespace bulge {

// One point of the linearized load-deflection plot: x = h^2 [m^2],
// y = P/h [Pa/m]. On these axes the membrane model is the straight line
// y = A + B x with A = c1 t sigma0 / a^2 and B = f t E / ((1 - nu) a^4).
struct LinearizedPoint {
  double x;
  double y;
};

// Samples with h <= min_deflection are dropped (they sit in the regime where
// bending and measurement noise dominate). Throws Error(TooFewPoints) when
// fewer than three samples survive.
std::vector<LinearizedPoint> linearize(const PressureDeflectionCurve& curve,
                                       double min_deflection);

struct LineFit {
  double intercept;
  double slope;
  double r_squared;
};

// Ordinary least squares y = intercept + slope * x. Requires >= 3 points and
// a non-degenerate abscissa. r_squared is 1 when the residuals vanish, even
// for a horizontal line.
LineFit fit_line(const std::vector<LinearizedPoint>& points);

// Eigen-friendly core used by fit_line; any dense real vector pair works,
// including long-double vectors in verification code.
template <typename DerivedX, typename DerivedY>
auto fit_line(const Eigen::DenseBase<DerivedX>& x, const Eigen::DenseBase<DerivedY>& y)
    -> std::pair<typename DerivedX::Scalar, typename DerivedX::Scalar>;

struct FitResult {
  double intercept_A = 0.0;       // Pa/m
  double slope_B = 0.0;           // Pa/m^3
  double sigma0 = 0.0;            // Pa, = intercept_A * a^2 / (c1 * t)
  double biaxial_modulus = 0.0;   // Pa, = slope_B * a^4 / (f * t)
  double youngs_modulus_E = 0.0;  // Pa, = (1 - nu_assumed) * biaxial_modulus
  double nu_assumed = 0.0;
  double r_squared = 0.0;
  double u_sigma0 = 0.0;          // 1-sigma, geometry-driven; 0 until propagated
  double u_E = 0.0;
  MembraneGeometry geometry;
  ShapeCoefficients coeffs;
  std::string label;
};

// The algebra that defines the derived fields; kept callable so consistency
// of a stored FitResult can be re-checked bit for bit.
inline double sigma0_from_intercept(double intercept_A, double a, double c1, double t) {
  return intercept_A * (a * a) / (c1 * t);
}
inline double biaxial_from_slope(double slope_B, double a, double f, double t) {
  const double a2 = a * a;
  return slope_B * (a2 * a2) / (f * t);
}

// Converts a fitted line into film properties. Requires intercept_A > 0 and
// slope_B > 0; a non-positive intercept means the film is not in tension and
// the linearized model does not apply.
FitResult extract_parameters(double intercept_A, double slope_B,
                             const MembraneGeometry& geometry, double nu_assumed,
                             CoefficientSource source = CoefficientSource::VlassakNix,
                             const CoefficientTable* table = nullptr);

// linearize + fit_line + extract_parameters. min_deflection defaults to
// 10 * thickness, the regime where the membrane (no-bending) model holds.
FitResult fit_curve(const PressureDeflectionCurve& curve,
                    const MembraneGeometry& geometry, double nu_assumed,
                    CoefficientSource source = CoefficientSource::VlassakNix,
                    std::optional<double> min_deflection = std::nullopt,
                    const CoefficientTable* table = nullptr);

struct UncertaintySpec {
  int n_samples = 10000;   // >= 100
  std::uint64_t seed = 42;
  bool perturb_a = true;
  bool perturb_b = true;
  bool perturb_t = true;
};

struct UncertaintyResult {
  double u_sigma0 = 0.0;
  double u_E = 0.0;
  int n_failed = 0;
};

// Monte-Carlo propagation of the geometry uncertainties through the fit:
// each draw perturbs (a, b, t) by independent Gaussians truncated at
// +-4 sigma (and at zero), re-runs fit_curve and records (sigma0, E); the
// reported u's are sample standard deviations. Deterministic for a fixed
// seed. Throws Error(MonteCarloFailure) when more than 10% of draws fail.
UncertaintyResult propagate_uncertainty(const PressureDeflectionCurve& curve,
                                        const MembraneGeometry& geometry,
                                        double nu_assumed, CoefficientSource source,
                                        const UncertaintySpec& spec,
                                        std::optional<double> min_deflection = std::nullopt,
                                        const CoefficientTable* table = nullptr);

// ------------------------------------------------------------------
// Template implementation
// ------------------------------------------------------------------

template <typename DerivedX, typename DerivedY>
auto fit_line(const Eigen::DenseBase<DerivedX>& x, const Eigen::DenseBase<DerivedY>& y)
    -> std::pair<typename DerivedX::Scalar, typename DerivedX::Scalar> {
  using Scalar = typename DerivedX::Scalar;
  const auto n = static_cast<Scalar>(x.size());
  const Scalar x_mean = x.derived().array().sum() / n;
  const Scalar y_mean = y.derived().array().sum() / n;
  const auto dx = x.derived().array() - x_mean;
  const auto dy = y.derived().array() - y_mean;
  const Scalar sxx = (dx * dx).sum();
  const Scalar sxy = (dx * dy).sum();
  const Scalar slope = sxy / sxx;
  const Scalar intercept = y_mean - slope * x_mean;
  return {intercept, slope};
}

}  // namespace bulge

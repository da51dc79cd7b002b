#include "bulge/model.hpp"

#include <algorithm>
#include <cmath>

#include "bulge/errors.hpp"

namespace bulge {

ModelCoefficients model_coefficients(const MembraneGeometry& geometry,
                                     const MaterialParams& material,
                                     bool include_bending, CoefficientSource source,
                                     const CoefficientTable* table) {
  const ShapeCoefficients shape =
      coefficients_for(geometry.aspect_ratio(), material.poisson_nu, source, table);

  const double a = geometry.half_width_a;
  const double t = geometry.thickness_t;
  const double a2 = a * a;
  const double a4 = a2 * a2;
  const double nu = material.poisson_nu;
  const double E = material.youngs_modulus_E;

  ModelCoefficients m{};
  m.shape = shape;
  m.linear_tension = shape.c1 * t * material.residual_stress_sigma0 / a2;
  m.linear_bending = include_bending
                         ? E / (12.0 * shape.alpha * (1.0 - nu * nu)) * (t * t * t) / a4
                         : 0.0;
  m.cubic = shape.f_of_nu * (t / a4) * (E / (1.0 - nu));
  return m;
}

double forward_pressure(const MembraneGeometry& geometry, const MaterialParams& material,
                        double deflection_h, bool include_bending,
                        CoefficientSource source, const CoefficientTable* table) {
  require(std::isfinite(deflection_h) && deflection_h >= 0.0, ErrorCode::InvalidArgument,
          "deflection must be >= 0");
  return model_coefficients(geometry, material, include_bending, source, table)
      .pressure(deflection_h);
}

double forward_deflection(const ModelCoefficients& model, double pressure) {
  require(std::isfinite(pressure) && pressure >= 0.0, ErrorCode::InvalidArgument,
          "pressure must be >= 0");
  const double L = model.linear_total();
  const double B = model.cubic;
  require(L >= 0.0, ErrorCode::NonMonotoneModel,
          "P(h) is not monotone: compressive prestress exceeds any bending stiffness");

  if (pressure == 0.0) return 0.0;
  if (B == 0.0) {
    require(L > 0.0, ErrorCode::NonMonotoneModel, "model has no stiffness");
    return pressure / L;
  }

  // Both candidate bounds overshoot the root, so the tighter one brackets it.
  double hi = std::cbrt(pressure / B);
  if (L > 0.0) hi = std::min(hi, pressure / L);
  double lo = 0.0;

  // Newton from the upper bound; P(h) is convex increasing on [0, hi] so the
  // iterates descend monotonically, with bisection as a safety net.
  double h = hi;
  for (int iter = 0; iter < 200; ++iter) {
    const double value = L * h + B * h * h * h - pressure;
    const double slope = L + 3.0 * B * h * h;
    if (value > 0.0) {
      hi = h;
    } else {
      lo = h;
    }
    double next = h - value / slope;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - h) <= 1e-12 * std::max(next, h)) return next;
    h = next;
  }
  return h;
}

double forward_deflection(const MembraneGeometry& geometry, const MaterialParams& material,
                          double pressure, bool include_bending,
                          CoefficientSource source, const CoefficientTable* table) {
  return forward_deflection(
      model_coefficients(geometry, material, include_bending, source, table), pressure);
}

}  // namespace bulge

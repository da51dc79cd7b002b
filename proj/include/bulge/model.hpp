#pragma once

#include "bulge/coefficients.hpp"
#include "bulge/geometry.hpp"

namespace bulge {

// The load-deflection model split into its three coefficients, so that
//   P(h) = (linear_tension + linear_bending) * h + cubic * h^3.
// linear_bending is zero when bending was not requested.
struct ModelCoefficients {
  double linear_tension;  // Pa/m
  double linear_bending;  // Pa/m
  double cubic;           // Pa/m^3
  ShapeCoefficients shape;

  double linear_total() const { return linear_tension + linear_bending; }

  template <typename Scalar>
  Scalar pressure(Scalar h) const {
    return (Scalar(linear_tension) + Scalar(linear_bending)) * h +
           Scalar(cubic) * h * h * h;
  }
};

ModelCoefficients model_coefficients(const MembraneGeometry& geometry,
                                     const MaterialParams& material,
                                     bool include_bending = false,
                                     CoefficientSource source = CoefficientSource::VlassakNix,
                                     const CoefficientTable* table = nullptr);

// Centre pressure required to hold deflection h (h >= 0).
double forward_pressure(const MembraneGeometry& geometry, const MaterialParams& material,
                        double deflection_h, bool include_bending = false,
                        CoefficientSource source = CoefficientSource::VlassakNix,
                        const CoefficientTable* table = nullptr);

// Centre deflection under pressure P (P >= 0); the unique non-negative root
// of the cubic model, found by safeguarded Newton to 1e-12 relative.
// Throws Error(NonMonotoneModel) when the linear coefficient is negative,
// i.e. compressive prestress that bending stiffness does not compensate.
double forward_deflection(const MembraneGeometry& geometry, const MaterialParams& material,
                          double pressure, bool include_bending = false,
                          CoefficientSource source = CoefficientSource::VlassakNix,
                          const CoefficientTable* table = nullptr);

double forward_deflection(const ModelCoefficients& model, double pressure);

}  // namespace bulge

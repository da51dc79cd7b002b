#include "bulge/geometry.hpp"

#include <cmath>
#include <string>
#include <utility>

#include "bulge/errors.hpp"

namespace bulge {

namespace {

void check_finite_positive(double v, const char* what) {
  require(std::isfinite(v) && v > 0.0, ErrorCode::InvalidArgument,
          std::string(what) + " must be finite and > 0");
}

void check_uncertainty(double v, const char* what) {
  require(std::isfinite(v) && v >= 0.0, ErrorCode::InvalidArgument,
          std::string(what) + " must be finite and >= 0");
}

}  // namespace

MembraneGeometry::MembraneGeometry(double a, double b, double t,
                                   double ua, double ub, double ut)
    : half_width_a(a), half_length_b(b), thickness_t(t),
      sigma_a(ua), sigma_b(ub), sigma_t(ut) {
  check_finite_positive(half_width_a, "half_width_a");
  check_finite_positive(half_length_b, "half_length_b");
  check_finite_positive(thickness_t, "thickness_t");
  check_uncertainty(sigma_a, "sigma_a");
  check_uncertainty(sigma_b, "sigma_b");
  check_uncertainty(sigma_t, "sigma_t");
  require(thickness_t < half_width_a, ErrorCode::InvalidArgument,
          "thickness_t must be small compared to the membrane half-width");
  if (half_width_a > half_length_b) {
    std::swap(half_width_a, half_length_b);
    std::swap(sigma_a, sigma_b);
  }
}

MembraneGeometry MembraneGeometry::from_full_dimensions(double width_2a, double length_2b,
                                                        double t, double u_2a,
                                                        double u_2b, double u_t) {
  return MembraneGeometry(width_2a / 2.0, length_2b / 2.0, t,
                          u_2a / 2.0, u_2b / 2.0, u_t);
}

MaterialParams::MaterialParams(double E, double nu, double sigma0)
    : youngs_modulus_E(E), poisson_nu(nu), residual_stress_sigma0(sigma0) {
  check_finite_positive(youngs_modulus_E, "youngs_modulus_E");
  require(std::isfinite(nu) && nu > -1.0 && nu < 0.5, ErrorCode::InvalidArgument,
          "poisson_nu must lie in (-1, 0.5)");
  require(std::isfinite(sigma0), ErrorCode::InvalidArgument,
          "residual_stress_sigma0 must be finite");
}

}  // namespace bulge

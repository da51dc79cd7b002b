#pragma once

namespace bulge {

// Rectangular membrane window. All lengths in metres. Half-dimensions are
// stored so that half_width_a <= half_length_b; constructing with a > b swaps
// the pair (and the matching uncertainties), which leaves the physics
// unchanged. sigma_* are 1-sigma absolute uncertainties used by the
// Monte-Carlo propagation; zero means "treat as exact".
struct MembraneGeometry {
  double half_width_a;
  double half_length_b;
  double thickness_t;
  double sigma_a = 0.0;
  double sigma_b = 0.0;
  double sigma_t = 0.0;

  MembraneGeometry(double a, double b, double t,
                   double ua = 0.0, double ub = 0.0, double ut = 0.0);

  // Convenience for data given as full window dimensions 2a x 2b.
  static MembraneGeometry from_full_dimensions(double width_2a, double length_2b,
                                               double t, double u_2a = 0.0,
                                               double u_2b = 0.0, double u_t = 0.0);

  double aspect_ratio() const { return half_length_b / half_width_a; }
};

// Film material state. residual_stress_sigma0 may be negative (compressive
// films occur in stacks); ops that need a taut membrane check for that
// themselves.
struct MaterialParams {
  double youngs_modulus_E;      // Pa
  double poisson_nu;            // dimensionless, -1 < nu < 0.5
  double residual_stress_sigma0;  // Pa

  MaterialParams(double E, double nu, double sigma0);

  double biaxial_modulus() const { return youngs_modulus_E / (1.0 - poisson_nu); }
};

}  // namespace bulge

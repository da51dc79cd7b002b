#pragma once

#include <string>
#include <vector>

#include "bulge/coefficients.hpp"
#include "bulge/fitting.hpp"
#include "bulge/geometry.hpp"

namespace bulge {

// The cubic-term slopes of a square and a rectangular membrane of the same
// film satisfy
//   B_rect / B_square = [f_rect(nu) / f_square(nu)] * (a_square / a_rect)^4,
// which depends on nu but not on thickness or modulus. The residual below is
//   predicted_ratio(nu) - observed_ratio,
// whose root in nu is the film's Poisson ratio.
//
// Preconditions (checked): both slopes > 0, the "square" geometry has
// aspect ratio within 2% of 1, the rectangle's aspect ratio exceeds the
// square's, and the two aspect ratios differ by at least 0.5 -- closer shapes
// give a residual too flat in nu to invert (Error(ShapeTooSimilar)).
double slope_ratio_residual(double nu, double slope_rect, double slope_square,
                            const MembraneGeometry& geom_rect,
                            const MembraneGeometry& geom_square,
                            CoefficientSource source,
                            const CoefficientTable* table = nullptr);

namespace detail {
// Residual without the shape guards, for diagnostics and for callers that
// have already validated the pair.
double slope_ratio_residual_unchecked(double nu, double slope_rect, double slope_square,
                                      const MembraneGeometry& geom_rect,
                                      const MembraneGeometry& geom_square,
                                      CoefficientSource source,
                                      const CoefficientTable* table = nullptr);
}  // namespace detail

struct PoissonSolveReport {
  double nu = 0.0;
  double delta_nu = 0.0;      // 1-sigma from the lateral-dimension Monte-Carlo
  double slope_ratio = 0.0;   // observed B_rect / B_square
  double bracket_lo = 0.0;    // final bisection bracket
  double bracket_hi = 0.0;
  int iterations = 0;
  int n_failed_draws = 0;
  std::string label_square;
  std::string label_rect;
  std::vector<std::string> warnings;
};

// Brackets the residual on nu in (-0.49, 0.49) and bisects to |dnu| < 1e-6.
// delta_nu comes from re-solving under Monte-Carlo perturbation of both
// membranes' lateral dimensions (a and b, Gaussians truncated at +-4 sigma),
// using the sigma_a/sigma_b stored in the fit geometries. Deterministic for
// a fixed spec.seed. A >10% Young's-modulus mismatch between the two fits is
// reported as a warning since it violates the same-film assumption.
PoissonSolveReport solve_poisson(const FitResult& fit_square, const FitResult& fit_rect,
                                 CoefficientSource source,
                                 const UncertaintySpec& spec = {},
                                 const CoefficientTable* table = nullptr);

}  // namespace bulge

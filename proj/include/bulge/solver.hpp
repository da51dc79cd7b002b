#pragma once

#include <functional>
#include <vector>

#include <Eigen/Core>

#include "bulge/coefficients.hpp"
#include "bulge/curve.hpp"
#include "bulge/geometry.hpp"

namespace bulge {

// Large-deflection membrane solver configuration. Grid counts are full-domain
// node counts; both must be odd (so the centre is a node) and at least 17.
// With symmetry_reduction the problem is solved on one quarter of the window
// at the same resolution, which is valid because a uniform pressure load on a
// rectangle has a doubly-symmetric solution.
struct SolverConfig {
  int grid_nx = 65;
  int grid_ny = 65;
  int max_iterations = 50000;
  double gradient_tolerance = 1e-6;     // relative to the load-vector norm, (0, 1e-4]
  std::vector<double> pressure_steps;   // Pa, strictly increasing; empty = auto ladder
  bool symmetry_reduction = true;
  bool record_energy_trace = false;
  bool throw_on_nonconvergence = true;

  void validate() const;
};

// Converged displacement state on the full grid, SI units. u is the in-plane
// displacement along x (the short half-width direction), v along y, w the
// out-of-plane deflection. energy is the scaled total potential (diagnostic).
struct DeflectionField {
  Eigen::ArrayXXd w;  // (nx, ny), metres
  Eigen::ArrayXXd u;
  Eigen::ArrayXXd v;
  Eigen::VectorXd x;  // node coordinates, metres, x in [-a, a]
  Eigen::VectorXd y;  // y in [-b, b]
  bool converged = false;
  double residual_norm = 0.0;
  int iterations = 0;
  double energy = 0.0;
  std::vector<double> energy_trace;  // filled when record_energy_trace is set

  double center_deflection() const;
  Eigen::VectorXd midline_w() const;  // w along y = 0
};

// Minimizes the von Karman membrane energy (stretching + pretension, no
// bending) under uniform pressure with clamped edges, by nonlinear conjugate
// gradients. Deterministic. Throws Error(NotConverged) with diagnostics when
// the iteration budget is exhausted (unless configured otherwise, in which
// case the field is returned with converged = false).
DeflectionField solve_membrane(const MembraneGeometry& geometry,
                               const MaterialParams& material, double pressure,
                               const SolverConfig& config);

// Warm-started variant; `initial` must come from the same grid and geometry.
DeflectionField solve_membrane(const MembraneGeometry& geometry,
                               const MaterialParams& material, double pressure,
                               const SolverConfig& config,
                               const DeflectionField& initial);

struct CoefficientExtraction {
  double c1 = 0.0;
  double f = 0.0;
  double rel_residual = 0.0;  // RMS of (P_model - P)/P over the ladder
  std::vector<PressureDeflectionSample> samples;
};

// Runs a pressure ladder (12 log-spaced steps spanning centre deflections of
// roughly 0.5 t to 500 t unless config.pressure_steps overrides it), then
// fits P = A h + B h^3 by relative least squares and converts to the shape
// coefficients c1 = A a^2 / (t sigma0), f = B a^4 (1 - nu) / (E t).
// Throws Error(PoorFit) when the two-term model misses the solver data by
// more than 1% RMS.
CoefficientExtraction extract_coefficients(const MembraneGeometry& geometry,
                                           const MaterialParams& material,
                                           const SolverConfig& config);

using TableProgress =
    std::function<void(double aspect_ratio, double nu, double c1, double f)>;

// Tabulates solver-derived (c1, f) over the given aspect ratios and Poisson
// ratios. config.grid_nx fixes the x resolution; the y node count is derived
// per ratio so the y spacing stays constant across the whole table (error
// trends in the table then reflect physics, not grid snapping). Failures are
// collected per entry and reported together.
CoefficientTable build_coefficient_table(std::vector<double> aspect_ratios,
                                         std::vector<double> nus,
                                         const SolverConfig& config,
                                         const TableProgress& progress = {});

// Centre deflection of the pretension-only (linear) problem on the same
// rectangle, from the classical series solution; used for pressure-ladder
// scaling and available as an independent small-load check.
double linear_center_deflection(const MembraneGeometry& geometry,
                                const MaterialParams& material, double pressure);

}  // namespace bulge

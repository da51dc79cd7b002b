#include "test_oracles.hpp"

#include <cmath>
#include <stdexcept>

#include <Eigen/SparseCholesky>
#include <Eigen/SparseCore>

#include "bulge/model.hpp"

namespace testsupport {

Eigen::ArrayXXd poisson_reference(int nx, int ny, double ratio, double s,
                                  double p_hat) {
  const double dx = 2.0 / (nx - 1);
  const double dy = 2.0 * ratio / (ny - 1);
  const int mx = nx - 2, my = ny - 2;  // interior nodes
  const auto id = [my](int i, int j) { return i * my + j; };

  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(static_cast<std::size_t>(5 * mx * my));
  const double cx = s / (dx * dx), cy = s / (dy * dy);
  for (int i = 0; i < mx; ++i) {
    for (int j = 0; j < my; ++j) {
      trips.emplace_back(id(i, j), id(i, j), 2.0 * (cx + cy));
      if (i > 0) trips.emplace_back(id(i, j), id(i - 1, j), -cx);
      if (i < mx - 1) trips.emplace_back(id(i, j), id(i + 1, j), -cx);
      if (j > 0) trips.emplace_back(id(i, j), id(i, j - 1), -cy);
      if (j < my - 1) trips.emplace_back(id(i, j), id(i, j + 1), -cy);
    }
  }
  Eigen::SparseMatrix<double> lap(mx * my, mx * my);
  lap.setFromTriplets(trips.begin(), trips.end());

  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> chol(lap);
  if (chol.info() != Eigen::Success)
    throw std::runtime_error("reference Poisson factorization failed");
  const Eigen::VectorXd rhs = Eigen::VectorXd::Constant(mx * my, p_hat);
  const Eigen::VectorXd sol = chol.solve(rhs);

  Eigen::ArrayXXd w = Eigen::ArrayXXd::Zero(nx, ny);
  for (int i = 0; i < mx; ++i)
    for (int j = 0; j < my; ++j) w(i + 1, j + 1) = sol(id(i, j));
  return w;
}

StripSolution strip_reference(double a, double t, double E, double nu,
                              double sigma0, double P) {
  const double eprime = E / (1.0 - nu * nu);
  const double cubic_rhs = t * eprime * P * P * a * a / 6.0;
  const auto g = [&](double n) {
    return n * n * n - t * sigma0 * n * n - cubic_rhs;
  };
  double lo = 0.0;
  double hi = std::max(2.0 * t * sigma0, 2.0 * std::cbrt(cubic_rhs)) + t * sigma0;
  while (g(hi) < 0.0) hi *= 2.0;
  for (int k = 0; k < 200; ++k) {
    const double mid = 0.5 * (lo + hi);
    (g(mid) < 0.0 ? lo : hi) = mid;
  }
  StripSolution out;
  out.tension_N = 0.5 * (lo + hi);
  out.pressure = P;
  out.half_width = a;
  out.center_h = P * a * a / (2.0 * out.tension_N);
  return out;
}

std::pair<double, double> fit_line_normal_equations(
    const std::vector<bulge::LinearizedPoint>& points) {
  long double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (const auto& p : points) {
    const long double x = p.x, y = p.y;
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const long double n = static_cast<long double>(points.size());
  const long double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  const long double intercept = (sy - slope * sx) / n;
  return {static_cast<double>(intercept), static_cast<double>(slope)};
}

bulge::PressureDeflectionCurve synthetic_curve(
    const bulge::MembraneGeometry& geometry, const bulge::MaterialParams& material,
    bulge::CoefficientSource source, int n, double h_lo_over_t,
    double h_hi_over_t, const std::string& label) {
  const double t = geometry.thickness_t;
  std::vector<bulge::PressureDeflectionSample> samples;
  samples.reserve(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) {
    const double h = t * h_lo_over_t *
                     std::pow(h_hi_over_t / h_lo_over_t, double(k) / (n - 1));
    samples.push_back(
        {bulge::forward_pressure(geometry, material, h, false, source), h});
  }
  return bulge::PressureDeflectionCurve(std::move(samples), label);
}

std::pair<bulge::FitResult, bulge::FitResult> synthetic_fit_pair(
    double nu_true, const bulge::MembraneGeometry& geom_square,
    const bulge::MembraneGeometry& geom_rect, double E, double sigma0,
    bulge::CoefficientSource source) {
  const auto make = [&](const bulge::MembraneGeometry& g, const char* label) {
    const auto shape = bulge::coefficients_for(g.aspect_ratio(), nu_true, source);
    const double a = g.half_width_a, t = g.thickness_t;
    const double A = shape.c1 * t * sigma0 / (a * a);
    const double B = shape.f_of_nu * t * E / ((1.0 - nu_true) * a * a * a * a);
    auto fit = bulge::extract_parameters(A, B, g, 0.3, source);
    fit.label = label;
    return fit;
  };
  return {make(geom_square, "square"), make(geom_rect, "rect")};
}

}  // namespace testsupport

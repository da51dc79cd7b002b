#include "bulge/poisson.hpp"

#include <cmath>
#include <string>

#include "bulge/errors.hpp"
#include "bulge/random.hpp"

namespace bulge {

namespace {

constexpr double kNuLo = -0.49;
constexpr double kNuHi = 0.49;
constexpr double kNuTolerance = 1e-6;
constexpr double kSquareAspectMax = 1.02;
constexpr double kMinAspectSeparation = 0.5;

double predicted_ratio(double nu, const MembraneGeometry& geom_rect,
                       const MembraneGeometry& geom_square, CoefficientSource source,
                       const CoefficientTable* table) {
  const double f_rect =
      coefficients_for(geom_rect.aspect_ratio(), nu, source, table).f_of_nu;
  const double f_square =
      coefficients_for(geom_square.aspect_ratio(), nu, source, table).f_of_nu;
  const double size_ratio = geom_square.half_width_a / geom_rect.half_width_a;
  const double size4 = size_ratio * size_ratio * size_ratio * size_ratio;
  return f_rect / f_square * size4;
}

void check_pair(double slope_rect, double slope_square,
                const MembraneGeometry& geom_rect, const MembraneGeometry& geom_square) {
  require(std::isfinite(slope_rect) && slope_rect > 0.0, ErrorCode::InvalidArgument,
          "rectangle slope must be > 0");
  require(std::isfinite(slope_square) && slope_square > 0.0, ErrorCode::InvalidArgument,
          "square slope must be > 0");
  require(geom_square.aspect_ratio() <= kSquareAspectMax, ErrorCode::InvalidArgument,
          "reference membrane must be square (aspect ratio within 2% of 1)");
  require(geom_rect.aspect_ratio() > geom_square.aspect_ratio(),
          ErrorCode::InvalidArgument,
          "rectangle aspect ratio must exceed the square's");
  require(geom_rect.aspect_ratio() - geom_square.aspect_ratio() >= kMinAspectSeparation,
          ErrorCode::ShapeTooSimilar,
          "aspect ratios differ by less than 0.5; slope ratio is too flat in nu");
}

struct BisectionResult {
  double nu;
  double lo;
  double hi;
  int iterations;
};

BisectionResult bisect_nu(double observed_ratio, const MembraneGeometry& geom_rect,
                          const MembraneGeometry& geom_square, CoefficientSource source,
                          const CoefficientTable* table) {
  const auto residual = [&](double nu) {
    return predicted_ratio(nu, geom_rect, geom_square, source, table) - observed_ratio;
  };

  double lo = kNuLo, hi = kNuHi;
  double r_lo = residual(lo);
  const double r_hi = residual(hi);
  if (r_lo == 0.0) return {lo, lo, lo, 0};
  if (r_hi == 0.0) return {hi, hi, hi, 0};
  require(std::signbit(r_lo) != std::signbit(r_hi), ErrorCode::NoRootInBracket,
          "slope ratio has no Poisson-ratio solution in (-0.49, 0.49)");

  int iterations = 0;
  while (hi - lo > kNuTolerance) {
    ++iterations;
    const double mid = 0.5 * (lo + hi);
    const double r_mid = residual(mid);
    if (r_mid == 0.0) return {mid, mid, mid, iterations};
    if (std::signbit(r_mid) == std::signbit(r_lo)) {
      lo = mid;
      r_lo = r_mid;
    } else {
      hi = mid;
    }
  }
  return {0.5 * (lo + hi), lo, hi, iterations};
}

}  // namespace

namespace detail {

double slope_ratio_residual_unchecked(double nu, double slope_rect, double slope_square,
                                      const MembraneGeometry& geom_rect,
                                      const MembraneGeometry& geom_square,
                                      CoefficientSource source,
                                      const CoefficientTable* table) {
  return predicted_ratio(nu, geom_rect, geom_square, source, table) -
         slope_rect / slope_square;
}

}  // namespace detail

double slope_ratio_residual(double nu, double slope_rect, double slope_square,
                            const MembraneGeometry& geom_rect,
                            const MembraneGeometry& geom_square,
                            CoefficientSource source, const CoefficientTable* table) {
  check_pair(slope_rect, slope_square, geom_rect, geom_square);
  return detail::slope_ratio_residual_unchecked(nu, slope_rect, slope_square, geom_rect,
                                                geom_square, source, table);
}

PoissonSolveReport solve_poisson(const FitResult& fit_square, const FitResult& fit_rect,
                                 CoefficientSource source, const UncertaintySpec& spec,
                                 const CoefficientTable* table) {
  require(spec.n_samples >= 100, ErrorCode::InvalidArgument, "n_samples must be >= 100");
  const MembraneGeometry& gs = fit_square.geometry;
  const MembraneGeometry& gr = fit_rect.geometry;
  check_pair(fit_rect.slope_B, fit_square.slope_B, gr, gs);

  const double observed_ratio = fit_rect.slope_B / fit_square.slope_B;
  const BisectionResult nominal = bisect_nu(observed_ratio, gr, gs, source, table);

  PoissonSolveReport report;
  report.nu = nominal.nu;
  report.slope_ratio = observed_ratio;
  report.bracket_lo = nominal.lo;
  report.bracket_hi = nominal.hi;
  report.iterations = nominal.iterations;
  report.label_square = fit_square.label;
  report.label_rect = fit_rect.label;

  // The slopes are regression outputs and carry no geometry, so lateral
  // uncertainty enters only through the (a_s/a_r)^4 factor and the f lookups.
  RandomStream rng(spec.seed);
  std::vector<double> nu_draws;
  nu_draws.reserve(static_cast<std::size_t>(spec.n_samples));
  int failed = 0;
  for (int draw = 0; draw < spec.n_samples; ++draw) {
    const auto as = rng.truncated_gaussian(gs.half_width_a, gs.sigma_a, 4.0, true);
    const auto bs = rng.truncated_gaussian(gs.half_length_b, gs.sigma_b, 4.0, true);
    const auto ar = rng.truncated_gaussian(gr.half_width_a, gr.sigma_a, 4.0, true);
    const auto br = rng.truncated_gaussian(gr.half_length_b, gr.sigma_b, 4.0, true);
    if (!as || !bs || !ar || !br) {
      ++failed;
      continue;
    }
    try {
      const MembraneGeometry gs_draw(*as, *bs, gs.thickness_t);
      const MembraneGeometry gr_draw(*ar, *br, gr.thickness_t);
      nu_draws.push_back(
          bisect_nu(observed_ratio, gr_draw, gs_draw, source, table).nu);
    } catch (const Error&) {
      ++failed;
    }
  }
  require(failed <= spec.n_samples / 10, ErrorCode::MonteCarloFailure,
          std::to_string(failed) + " of " + std::to_string(spec.n_samples) +
              " Monte-Carlo draws failed");
  report.n_failed_draws = failed;

  if (nu_draws.size() >= 2) {
    double mean = 0.0;
    for (const double v : nu_draws) mean += v;
    mean /= static_cast<double>(nu_draws.size());
    double ss = 0.0;
    for (const double v : nu_draws) ss += (v - mean) * (v - mean);
    report.delta_nu = std::sqrt(ss / (static_cast<double>(nu_draws.size()) - 1.0));
  }

  const double e_mean = 0.5 * (fit_square.youngs_modulus_E + fit_rect.youngs_modulus_E);
  if (e_mean > 0.0 &&
      std::abs(fit_square.youngs_modulus_E - fit_rect.youngs_modulus_E) > 0.1 * e_mean) {
    report.warnings.push_back(
        "Young's moduli of the two fits differ by more than 10%; the pair may not "
        "be the same film");
  }

  return report;
}

}  // namespace bulge

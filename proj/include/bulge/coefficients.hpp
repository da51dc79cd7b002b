#pragma once

#include <cmath>
#include <string>
#include <string_view>
#include <vector>

namespace bulge {

// Where a (C1, f) pair came from. The first three are published closed-form
// sets (Vlassak & Nix 1992; Bonnotte et al. 1997; Maier-Schneider et al.
// 1995); SolverDerived marks values interpolated from the bundled table that
// the built-in membrane solver generated.
enum class CoefficientSource {
  VlassakNix,
  Bonnotte,
  MaierSchneider,
  SolverDerived,
};

std::string_view to_string(CoefficientSource source);
CoefficientSource coefficient_source_from_string(std::string_view name);

// Shape coefficients of the rectangular-membrane load-deflection model
//   P = c1 * (t * sigma0 / a^2) * h
//     + E / (12 * alpha * (1 - nu^2)) * (t^3 / a^4) * h     (bending, optional)
//     + f(nu) * (t / a^4) * (E / (1 - nu)) * h^3
// evaluated at a specific aspect ratio b/a and Poisson's ratio.
struct ShapeCoefficients {
  double c1;
  double f_of_nu;
  double alpha;
  CoefficientSource source;
  double aspect_ratio;
  double nu_used;
};

// ------------------------------------------------------------------
// Closed forms (square window b/a = 1 and the long-strip limit)
// ------------------------------------------------------------------

inline double f_square_vlassak_nix(double nu) {
  return std::pow(0.8 + 0.062 * nu, -3.0);
}
inline double f_square_maier_schneider(double nu) { return 1.994 * (1.0 - 0.271 * nu); }
inline double f_square_bonnotte(double nu) { return 1.91 * (1.0 - 0.207 * nu); }
inline double f_rect2_bonnotte(double nu) { return 1.08 * (1.0 - 0.181 * nu); }
inline double f_strip_vlassak_nix(double nu) { return 8.0 / (6.0 * (1.0 + nu)); }

inline constexpr double kC1SquareVlassakNix = 3.39;
inline constexpr double kC1SquareMaierSchneider = 3.45;
inline constexpr double kC1SquareBonnotte = 3.42;
inline constexpr double kC1Rect2Bonnotte = 2.19;
inline constexpr double kC1Strip = 2.0;

// Bending coefficient alpha(b/a); piecewise-linear between the published
// anchors alpha(1) = 1.26e-3, alpha(2) = 2.54e-3, alpha(>=4) = 2.6e-3.
double alpha_for(double aspect_ratio);

// A literature source answers directly when the requested ratio is within 2%
// of a ratio it covers; everything else falls back to the solver table.
inline constexpr double kSquareRatioTolerance = 1.02;
inline constexpr double kStripRatioThreshold = 4.0;

// ------------------------------------------------------------------
// Solver-derived coefficient table
// ------------------------------------------------------------------

struct CoefficientEntry {
  double aspect_ratio;
  double nu;
  double c1;
  double f;
};

// Dense rectilinear (aspect_ratio, nu) grid with bilinear interpolation.
// Lookups outside the gridded range are clamped to the edge, which is the
// physically right thing at the long-strip plateau and conservative
// elsewhere.
class CoefficientTable {
 public:
  CoefficientTable(std::vector<CoefficientEntry> entries, std::string provenance);

  // (c1, f) at the requested point; also reports the clamped nu actually used.
  struct Lookup {
    double c1;
    double f;
    double nu_used;
  };
  Lookup interpolate(double aspect_ratio, double nu) const;

  const std::vector<double>& aspect_ratios() const { return ratios_; }
  const std::vector<double>& nus() const { return nus_; }
  const std::vector<CoefficientEntry>& entries() const { return entries_; }
  const std::string& provenance() const { return provenance_; }

  double c1_at(std::size_t ratio_index, std::size_t nu_index) const;
  double f_at(std::size_t ratio_index, std::size_t nu_index) const;

  void save_csv(const std::string& path) const;
  static CoefficientTable load_csv(const std::string& path);

 private:
  std::vector<CoefficientEntry> entries_;  // sorted by (ratio, nu)
  std::vector<double> ratios_;
  std::vector<double> nus_;
  std::string provenance_;
};

// Resolution order for the bundled table: $BULGEKIT_DATA_DIR, then the
// compiled-in data directory. Returns nullptr when no table file exists;
// the pointer stays valid for the lifetime of the process.
const CoefficientTable* default_coefficient_table();
std::string default_table_path();

// ------------------------------------------------------------------
// Lookup
// ------------------------------------------------------------------

// Shape coefficients for a window of the given aspect ratio (b/a >= 1) at
// Poisson's ratio nu. Ratios a literature source does not cover are served
// from `table` (or the bundled default when table == nullptr) and tagged
// SolverDerived. Throws Error(UnsupportedRatio) when that fallback is needed
// but no table is available.
ShapeCoefficients coefficients_for(double aspect_ratio, double nu,
                                   CoefficientSource source,
                                   const CoefficientTable* table = nullptr);

}  // namespace bulge

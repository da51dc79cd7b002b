#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "bulge/coefficients.hpp"
#include "bulge/curve.hpp"
#include "bulge/fitting.hpp"
#include "bulge/geometry.hpp"
#include "bulge/mixture.hpp"
#include "bulge/poisson.hpp"

namespace bulge::io {

// ------------------------------------------------------------------
// Curve files
// ------------------------------------------------------------------
// CSV with a mandatory `pressure,deflection` header, an optional
// `#units: <pressure-unit>,<length-unit>` row before it, and `#` comments.
// Accepted units: pressure Pa/kPa/mbar/bar, length m/mm/um/nm; without a
// units row values are SI. Rows arriving out of pressure order are sorted
// (noted in `warnings`); duplicate pressures are an error.
PressureDeflectionCurve parse_curve(const std::string& path,
                                    std::vector<std::string>* warnings = nullptr);

// Same parser on in-memory text; `origin` names the source in errors.
PressureDeflectionCurve parse_curve_text(const std::string& text,
                                         const std::string& origin,
                                         std::vector<std::string>* warnings = nullptr);

void write_curve(const PressureDeflectionCurve& curve, const std::string& path,
                 const std::string& pressure_unit = "Pa",
                 const std::string& length_unit = "um");

// ------------------------------------------------------------------
// Bundled membrane dataset
// ------------------------------------------------------------------
// The ten demonstration membranes shipped with the tool: five LPCVD Si3N4
// monolayers (1M..5M) and five Si3N4/SiO2 bilayers (1B..5B), with window
// sizes, film thicknesses, and the reference film properties reported for
// them. Lateral dimensions carry the documented default +-0.5% uncertainty;
// thickness is treated as exact.
struct BundledMembrane {
  std::string label;
  MembraneGeometry geometry;
  double reference_sigma0;  // Pa
  double reference_E;       // Pa
};

const std::vector<BundledMembrane>& bundled_membranes();
const BundledMembrane& bundled_membrane(const std::string& label);
MembraneGeometry load_bundled_geometry(const std::string& label);

// Note attached to reports whenever the default lateral uncertainty is used.
inline constexpr const char* kLateralDefaultNote =
    "lateral dimension uncertainty (+-0.5% of each dimension) is a tool "
    "default, not a measured value";

// ------------------------------------------------------------------
// Experiment configuration (JSON)
// ------------------------------------------------------------------
// Schema (unknown keys are rejected):
//   {
//     "label": "1M",                                  [optional]
//     "geometry": {
//       "width_2a": "3.104 mm",          // string with unit, or number
//       "length_2b": "3.104 mm",         // (numbers use geometry.units)
//       "thickness_t": "104 nm",
//       "units": {"length": "mm", "thickness": "nm"}, [optional]
//       "uncertainties": {                            [optional]
//         "width_2a": "0.5%",            // percent of value, or absolute
//         "length_2b": "0.5%",
//         "thickness_t": "2 nm"
//       }
//     },
//     "material": {                                   [optional]
//       "youngs_modulus_E": "210 GPa",
//       "poisson_nu": 0.3,
//       "residual_stress_sigma0": "439 MPa"
//     },
//     "analysis": {                                   [optional]
//       "nu_assumed": 0.3,
//       "coefficient_source": "vlassak_nix",
//       "min_deflection_over_t": 10.0
//     },
//     "uncertainty": {"n_samples": 10000, "seed": 42} [optional]
//   }
// Omitting geometry.uncertainties applies the +-0.5% lateral default and
// sets lateral_uncertainty_defaulted.
struct ExperimentConfig {
  std::string label;
  MembraneGeometry geometry;
  bool lateral_uncertainty_defaulted = false;
  std::optional<MaterialParams> material;
  double nu_assumed = 0.3;
  CoefficientSource source = CoefficientSource::VlassakNix;
  std::optional<double> min_deflection_over_t;
  UncertaintySpec uncertainty;
};

ExperimentConfig load_experiment_config(const std::string& path);
ExperimentConfig parse_experiment_config(const std::string& text,
                                         const std::string& origin);

// ------------------------------------------------------------------
// Reports
// ------------------------------------------------------------------

enum class ReportFormat { Json, Text };

ReportFormat report_format_from_string(std::string_view name);

// A report bundles any number of results with the provenance needed to
// reproduce them: tool version, Monte-Carlo seed, and (per fit) the
// coefficient source. Serialization is locale-independent; JSON numbers
// round-trip exactly, text output carries 9 significant digits.
struct Report {
  std::string version;  // tool version that produced the report
  std::uint64_t seed = 42;
  std::vector<std::string> assumptions;
  std::vector<FitResult> fits;
  std::vector<PoissonSolveReport> poisson_results;
  std::vector<MixtureResult> mixture_results;

  Report();
};

void write_report(const Report& report, const std::string& path, ReportFormat format);
std::string report_to_string(const Report& report, ReportFormat format);

// JSON reports only; used to chain `fit` outputs into `poisson`.
Report read_report(const std::string& path);

}  // namespace bulge::io

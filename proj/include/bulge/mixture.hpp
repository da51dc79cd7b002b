#pragma once

#include <optional>
#include <string>
#include <vector>

#include "bulge/fitting.hpp"
#include "bulge/layer_stack.hpp"

namespace bulge {

// Which scalar the mixture rule is being applied to. The rule is exact for
// thickness-weighted in-plane stiffness and membrane force; applying it to
// Young's modulus or Poisson's ratio alone is the usual engineering
// approximation and results carry a note saying so.
enum class MixtureMode {
  BiaxialModulus,
  ResidualStress,
  YoungsModulus,
  PoissonRatio,
};

std::string_view to_string(MixtureMode mode);
MixtureMode mixture_mode_from_string(std::string_view name);

// Thickness-weighted average of the layer values:
//   M_composite = sum_i (t_i / t_total) * M_i.
// Requires every layer value to be present.
double compose(const LayerStack& stack);

// Recovers the single unknown layer's value from the composite value:
//   M_unknown = (t_total * M_composite - sum_known t_i * M_i) / t_unknown.
// Requires exactly one layer with a missing value.
double decompose_unknown(double composite_value, const LayerStack& stack);

struct UncertainValue {
  double value = 0.0;
  double u = 0.0;  // 1-sigma, >= 0
};

struct UncertainLayer {
  std::string name;
  UncertainValue thickness;           // m
  std::optional<UncertainValue> value;  // nullopt marks the unknown layer
};

struct MixtureResult {
  MixtureMode mode;
  UncertainValue result;
  int n_failed_draws = 0;
  std::vector<std::string> warnings;
};

// Monte-Carlo uncertainty for the decomposition: perturbs the composite
// value, the known layer values and every thickness by independent Gaussians
// truncated at +-4 sigma (thicknesses also at zero), re-decomposes each draw
// and reports the nominal result with the sample standard deviation.
// Deterministic for a fixed spec.seed; Error(MonteCarloFailure) when more
// than 10% of draws fail.
MixtureResult decompose_with_uncertainty(const UncertainValue& composite,
                                         const std::vector<UncertainLayer>& layers,
                                         MixtureMode mode,
                                         const UncertaintySpec& spec = {});

}  // namespace bulge

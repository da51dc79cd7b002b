#pragma once

#include <optional>
#include <string>
#include <vector>

namespace bulge {

// A film stack for the thickness-weighted mixture rule. A layer's property
// value is whatever scalar is being mixed (biaxial modulus, residual stress,
// Young's modulus or Poisson's ratio); std::nullopt marks the layer whose
// value is to be recovered by decomposition.
struct StackLayer {
  std::string name;
  double thickness;               // m, > 0
  std::optional<double> value;
};

struct LayerStack {
  std::vector<StackLayer> layers;
  double total_thickness;         // always the sum of the layer thicknesses

  explicit LayerStack(std::vector<StackLayer> stack_layers);

  // Validates a caller-supplied total against the layer sum (1e-9 relative).
  LayerStack(std::vector<StackLayer> stack_layers, double expected_total);

  std::size_t unknown_count() const;
};

}  // namespace bulge

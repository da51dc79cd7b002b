#include "bulge/layer_stack.hpp"

#include <cmath>
#include <utility>

#include "bulge/errors.hpp"

namespace bulge {

LayerStack::LayerStack(std::vector<StackLayer> stack_layers)
    : layers(std::move(stack_layers)), total_thickness(0.0) {
  require(!layers.empty(), ErrorCode::InvalidArgument, "layer stack is empty");
  for (const auto& layer : layers) {
    require(std::isfinite(layer.thickness) && layer.thickness > 0.0,
            ErrorCode::ZeroUnknownThickness,
            "layer '" + layer.name + "' must have thickness > 0");
    if (layer.value) {
      require(std::isfinite(*layer.value), ErrorCode::InvalidArgument,
              "layer '" + layer.name + "' has a non-finite property value");
    }
    total_thickness += layer.thickness;
  }
}

LayerStack::LayerStack(std::vector<StackLayer> stack_layers, double expected_total)
    : LayerStack(std::move(stack_layers)) {
  require(std::abs(expected_total - total_thickness) <= 1e-9 * total_thickness,
          ErrorCode::InvalidArgument,
          "stated total thickness disagrees with the sum of the layers");
}

std::size_t LayerStack::unknown_count() const {
  std::size_t n = 0;
  for (const auto& layer : layers)
    if (!layer.value) ++n;
  return n;
}

}  // namespace bulge

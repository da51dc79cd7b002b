#include "bulge/mixture.hpp"

#include <cmath>

#include "bulge/errors.hpp"
#include "bulge/random.hpp"

namespace bulge {

std::string_view to_string(MixtureMode mode) {
  switch (mode) {
    case MixtureMode::BiaxialModulus: return "biaxial_modulus";
    case MixtureMode::ResidualStress: return "residual_stress";
    case MixtureMode::YoungsModulus: return "youngs_modulus";
    case MixtureMode::PoissonRatio: return "poisson_ratio";
  }
  return "unknown";
}

MixtureMode mixture_mode_from_string(std::string_view name) {
  if (name == "biaxial_modulus") return MixtureMode::BiaxialModulus;
  if (name == "residual_stress") return MixtureMode::ResidualStress;
  if (name == "youngs_modulus") return MixtureMode::YoungsModulus;
  if (name == "poisson_ratio") return MixtureMode::PoissonRatio;
  fail(ErrorCode::InvalidArgument,
       "unknown mixture mode '" + std::string(name) +
           "' (expected biaxial_modulus, residual_stress, youngs_modulus or "
           "poisson_ratio)");
}

double compose(const LayerStack& stack) {
  require(stack.unknown_count() == 0, ErrorCode::InvalidArgument,
          "compose needs a value for every layer");
  double sum = 0.0;
  for (const auto& layer : stack.layers) sum += layer.thickness * *layer.value;
  return sum / stack.total_thickness;
}

double decompose_unknown(double composite_value, const LayerStack& stack) {
  require(std::isfinite(composite_value), ErrorCode::InvalidArgument,
          "composite value must be finite");
  const std::size_t unknowns = stack.unknown_count();
  require(unknowns != 0, ErrorCode::InvalidArgument,
          "stack has no unknown layer to solve for");
  require(unknowns == 1, ErrorCode::MultipleUnknowns,
          "stack has " + std::to_string(unknowns) +
              " unknown layers; decomposition needs exactly one");

  double known_sum = 0.0;
  double t_unknown = 0.0;
  for (const auto& layer : stack.layers) {
    if (layer.value) {
      known_sum += layer.thickness * *layer.value;
    } else {
      t_unknown = layer.thickness;
    }
  }
  return (stack.total_thickness * composite_value - known_sum) / t_unknown;
}

MixtureResult decompose_with_uncertainty(const UncertainValue& composite,
                                         const std::vector<UncertainLayer>& layers,
                                         MixtureMode mode, const UncertaintySpec& spec) {
  require(spec.n_samples >= 100, ErrorCode::InvalidArgument, "n_samples must be >= 100");
  require(std::isfinite(composite.u) && composite.u >= 0.0, ErrorCode::InvalidArgument,
          "composite uncertainty must be >= 0");
  for (const auto& layer : layers) {
    require(std::isfinite(layer.thickness.u) && layer.thickness.u >= 0.0 &&
                (!layer.value || (std::isfinite(layer.value->u) && layer.value->u >= 0.0)),
            ErrorCode::InvalidArgument, "layer uncertainties must be >= 0");
  }

  const auto build_stack = [&](const std::vector<double>& thicknesses,
                               const std::vector<std::optional<double>>& values) {
    std::vector<StackLayer> stack_layers;
    stack_layers.reserve(layers.size());
    for (std::size_t i = 0; i < layers.size(); ++i) {
      stack_layers.push_back({layers[i].name, thicknesses[i], values[i]});
    }
    return LayerStack(std::move(stack_layers));
  };

  std::vector<double> nominal_t(layers.size());
  std::vector<std::optional<double>> nominal_v(layers.size());
  for (std::size_t i = 0; i < layers.size(); ++i) {
    nominal_t[i] = layers[i].thickness.value;
    if (layers[i].value) nominal_v[i] = layers[i].value->value;
  }
  const double nominal = decompose_unknown(composite.value, build_stack(nominal_t, nominal_v));

  RandomStream rng(spec.seed);
  std::vector<double> draws;
  draws.reserve(static_cast<std::size_t>(spec.n_samples));
  int failed = 0;
  std::vector<double> t(layers.size());
  std::vector<std::optional<double>> v(layers.size());
  for (int draw = 0; draw < spec.n_samples; ++draw) {
    bool ok = true;
    const auto c = rng.truncated_gaussian(composite.value, composite.u, 4.0, false);
    ok = ok && c.has_value();
    for (std::size_t i = 0; i < layers.size(); ++i) {
      const auto ti =
          rng.truncated_gaussian(layers[i].thickness.value, layers[i].thickness.u, 4.0, true);
      ok = ok && ti.has_value();
      t[i] = ti.value_or(0.0);
      if (layers[i].value) {
        const auto vi =
            rng.truncated_gaussian(layers[i].value->value, layers[i].value->u, 4.0, false);
        ok = ok && vi.has_value();
        v[i] = vi;
      } else {
        v[i] = std::nullopt;
      }
    }
    if (!ok) {
      ++failed;
      continue;
    }
    try {
      draws.push_back(decompose_unknown(*c, build_stack(t, v)));
    } catch (const Error&) {
      ++failed;
    }
  }
  require(failed <= spec.n_samples / 10, ErrorCode::MonteCarloFailure,
          std::to_string(failed) + " of " + std::to_string(spec.n_samples) +
              " Monte-Carlo draws failed");

  double u = 0.0;
  if (draws.size() >= 2) {
    double mean = 0.0;
    for (const double x : draws) mean += x;
    mean /= static_cast<double>(draws.size());
    double ss = 0.0;
    for (const double x : draws) ss += (x - mean) * (x - mean);
    u = std::sqrt(ss / (static_cast<double>(draws.size()) - 1.0));
  }

  MixtureResult result{mode, {nominal, u}, failed, {}};
  if (mode == MixtureMode::YoungsModulus || mode == MixtureMode::PoissonRatio) {
    result.warnings.push_back(
        "thickness-weighted mixing of " + std::string(to_string(mode)) +
        " is an approximation; the rule is exact only for biaxial modulus and "
        "residual stress");
  }
  return result;
}

}  // namespace bulge

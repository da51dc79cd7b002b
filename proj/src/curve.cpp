#include "bulge/curve.hpp"

#include <cmath>
#include <utility>

#include "bulge/errors.hpp"

namespace bulge {

PressureDeflectionCurve::PressureDeflectionCurve(
    std::vector<PressureDeflectionSample> points, std::string curve_label)
    : samples(std::move(points)), label(std::move(curve_label)) {
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const auto& s = samples[i];
    require(std::isfinite(s.pressure) && std::isfinite(s.deflection),
            ErrorCode::InvalidArgument, "curve samples must be finite");
    require(s.pressure >= 0.0, ErrorCode::InvalidArgument,
            "pressures must be non-negative");
    require(s.deflection >= 0.0, ErrorCode::InvalidArgument,
            "deflections must be non-negative");
    if (s.pressure == 0.0) {
      require(i == 0 && s.deflection == 0.0, ErrorCode::InvalidArgument,
              "a zero-pressure sample is only allowed as the leading (0, 0) point");
    }
    if (i > 0) {
      require(s.pressure > samples[i - 1].pressure, ErrorCode::MonotonicityError,
              "pressures must be strictly increasing");
    }
  }
}

double PressureDeflectionCurve::max_deflection() const {
  double h = 0.0;
  for (const auto& s : samples) h = std::max(h, s.deflection);
  return h;
}

}  // namespace bulge

#pragma once

namespace bulge {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace bulge

#pragma once

namespace rmtlab {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace rmtlab

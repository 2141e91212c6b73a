#pragma once

namespace arisim {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace arisim

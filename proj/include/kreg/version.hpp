#pragma once

namespace kreg {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace kreg

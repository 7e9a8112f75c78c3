#pragma once

namespace perfsim {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace perfsim

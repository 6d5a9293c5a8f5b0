#pragma once

namespace dynmix {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace dynmix

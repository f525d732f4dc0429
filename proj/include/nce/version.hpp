#pragma once

namespace nce {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace nce

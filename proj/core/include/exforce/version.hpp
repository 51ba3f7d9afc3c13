#pragma once

namespace exforce {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace exforce

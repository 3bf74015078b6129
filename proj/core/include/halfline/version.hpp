#pragma once

namespace halfline {

inline constexpr const char* kVersion = "0.1.0";
inline constexpr const char* kSchema = "halfline-weyl/v1";

}  // namespace halfline

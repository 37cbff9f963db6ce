#pragma once

namespace bdf {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace bdf

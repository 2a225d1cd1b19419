#pragma once

namespace qdec {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace qdec

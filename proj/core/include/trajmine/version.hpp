#pragma once

namespace trajmine {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace trajmine

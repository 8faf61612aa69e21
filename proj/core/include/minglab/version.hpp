#pragma once

namespace minglab {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace minglab

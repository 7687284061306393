#pragma once

namespace btrank {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace btrank

#pragma once

namespace cohbound {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace cohbound

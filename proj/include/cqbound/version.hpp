#pragma once

namespace cqbound {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace cqbound

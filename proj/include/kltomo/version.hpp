#pragma once

namespace kltomo {

inline constexpr const char* kVersion = "0.1.0";

} // namespace kltomo

#pragma once

namespace sfegacn {

inline constexpr const char* kVersionString = "0.1.0";

} // namespace sfegacn

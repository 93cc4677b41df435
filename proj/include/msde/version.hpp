#pragma once

namespace msde {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace msde

#pragma once

namespace scenopt {

inline constexpr const char* kVersion = "0.1.0";

} // namespace scenopt

#pragma once

namespace streamopt {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace streamopt

#pragma once

namespace minslam {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace minslam

#pragma once

namespace tsd {

inline constexpr const char* kToolkitVersion = "1.0.0";

}  // namespace tsd

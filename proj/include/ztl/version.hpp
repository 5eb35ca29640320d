#pragma once

namespace ztl {

inline constexpr const char* kVersionString = "0.1.0";

}  // namespace ztl

#pragma once

namespace seqlid {

inline constexpr const char* kVersion = "1.0.0";

}  // namespace seqlid

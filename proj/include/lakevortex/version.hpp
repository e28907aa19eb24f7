#pragma once

namespace lakevortex {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace lakevortex

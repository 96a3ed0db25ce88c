#pragma once

namespace coda {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace coda

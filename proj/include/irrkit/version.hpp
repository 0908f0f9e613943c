#pragma once

namespace irrkit {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace irrkit

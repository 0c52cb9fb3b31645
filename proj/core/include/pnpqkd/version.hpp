#pragma once

namespace pnpqkd {

inline constexpr const char* kToolVersion = "0.1.0";

}  // namespace pnpqkd

#pragma once

namespace radbound {
inline constexpr const char* kVersion = "0.1.0";
}

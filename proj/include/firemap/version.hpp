#pragma once

namespace firemap {
inline constexpr const char* kVersion = "1.0.0";
}

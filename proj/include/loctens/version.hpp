#pragma once

namespace loctens {
inline constexpr const char* kVersion = "0.1.0";
}

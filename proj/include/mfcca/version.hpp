#pragma once

namespace mfcca {
inline constexpr const char* kVersion = "0.1.0";
}

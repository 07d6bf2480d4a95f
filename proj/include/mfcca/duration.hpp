#pragma once

#include <chrono>
#include <cstdint>
#include <string>
#include <string_view>

namespace mfcca {

using Millis = std::chrono::milliseconds;
using EpochMs = std::int64_t;

inline constexpr Millis kOneMinute{60'000};

/// Parses "30d", "5d", "10min", "6h", "90s", "250ms" or a bare integer (ms).
Millis parse_duration(std::string_view text);

/// Inverse of parse_duration using the largest unit that divides exactly.
std::string format_duration(Millis d);

/// Parses an epoch-millisecond integer or an ISO-8601 date-time
/// ("2020-03-01T12:00:00Z", "2020-03-01 12:00:00.250", "+02:00" offsets).
/// Returns false on failure.
bool parse_timestamp(std::string_view text, EpochMs& out);

/// Converts a wall-clock duration into a sample count; throws unless exact.
std::size_t to_samples(Millis d, Millis interval, std::string_view what);

}  // namespace mfcca

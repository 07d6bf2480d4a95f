#include "mfcca/duration.hpp"

#include <cctype>
#include <charconv>
#include <utility>

#include "mfcca/error.hpp"

namespace mfcca {
namespace {

bool parse_int(std::string_view s, std::int64_t& out) {
    if (s.empty()) return false;
    const char* end = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(s.data(), end, out);
    return ec == std::errc{} && ptr == end;
}

// Days since 1970-01-01 for a proleptic Gregorian date (H. Hinnant's algorithm).
std::int64_t days_from_civil(std::int64_t y, unsigned m, unsigned d) {
    y -= m <= 2;
    const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

bool fixed_digits(std::string_view s, std::size_t pos, std::size_t n, int& out) {
    if (pos + n > s.size()) return false;
    int v = 0;
    for (std::size_t i = pos; i < pos + n; ++i) {
        if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
        v = v * 10 + (s[i] - '0');
    }
    out = v;
    return true;
}

bool parse_iso8601(std::string_view s, EpochMs& out) {
    int year = 0, month = 0, day = 0, hour = 0, minute = 0, second = 0;
    if (!fixed_digits(s, 0, 4, year) || s.size() < 10 || s[4] != '-' ||
        !fixed_digits(s, 5, 2, month) || s[7] != '-' || !fixed_digits(s, 8, 2, day))
        return false;
    if (month < 1 || month > 12 || day < 1 || day > 31) return false;
    std::size_t pos = 10;
    std::int64_t millis = 0;
    std::int64_t offset_minutes = 0;
    if (pos < s.size()) {
        if (s[pos] != 'T' && s[pos] != ' ') return false;
        ++pos;
        if (!fixed_digits(s, pos, 2, hour) || pos + 2 >= s.size() || s[pos + 2] != ':' ||
            !fixed_digits(s, pos + 3, 2, minute))
            return false;
        pos += 5;
        if (pos < s.size() && s[pos] == ':') {
            if (!fixed_digits(s, pos + 1, 2, second)) return false;
            pos += 3;
        }
        if (pos < s.size() && s[pos] == '.') {
            ++pos;
            std::int64_t scale = 100;
            std::size_t digits = 0;
            while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) {
                millis += (s[pos] - '0') * scale;
                scale /= 10;
                ++pos;
                ++digits;
            }
            if (digits == 0) return false;
        }
        if (pos < s.size()) {
            if (s[pos] == 'Z') {
                ++pos;
            } else if (s[pos] == '+' || s[pos] == '-') {
                int oh = 0, om = 0;
                const int sign = s[pos] == '+' ? 1 : -1;
                if (!fixed_digits(s, pos + 1, 2, oh)) return false;
                std::size_t mpos = pos + 3;
                if (mpos < s.size() && s[mpos] == ':') ++mpos;
                if (!fixed_digits(s, mpos, 2, om)) return false;
                offset_minutes = sign * (oh * 60 + om);
                pos = mpos + 2;
            }
        }
        if (pos != s.size()) return false;
        if (hour > 23 || minute > 59 || second > 60) return false;
    }
    const std::int64_t days = days_from_civil(year, static_cast<unsigned>(month),
                                              static_cast<unsigned>(day));
    out = ((days * 24 + hour) * 60 + minute - offset_minutes) * 60'000 +
          static_cast<std::int64_t>(second) * 1000 + millis;
    return true;
}

}  // namespace

Millis parse_duration(std::string_view text) {
    std::size_t split = 0;
    while (split < text.size() && (std::isdigit(static_cast<unsigned char>(text[split])) != 0))
        ++split;
    std::int64_t amount = 0;
    if (split == 0 || !parse_int(text.substr(0, split), amount))
        throw InvalidArgument("invalid duration '" + std::string(text) + "'");
    const std::string_view unit = text.substr(split);
    std::int64_t scale = 0;
    if (unit.empty() || unit == "ms") scale = 1;
    else if (unit == "s") scale = 1000;
    else if (unit == "min" || unit == "m") scale = 60'000;
    else if (unit == "h") scale = 3'600'000;
    else if (unit == "d") scale = 86'400'000;
    else throw InvalidArgument("unknown duration unit in '" + std::string(text) + "'");
    return Millis{amount * scale};
}

std::string format_duration(Millis d) {
    static constexpr std::pair<std::int64_t, const char*> units[] = {
        {86'400'000, "d"}, {3'600'000, "h"}, {60'000, "min"}, {1000, "s"}};
    const std::int64_t ms = d.count();
    for (const auto& [scale, name] : units)
        if (ms != 0 && ms % scale == 0) return std::to_string(ms / scale) + name;
    return std::to_string(ms) + "ms";
}

bool parse_timestamp(std::string_view text, EpochMs& out) {
    if (text.empty()) return false;
    if (parse_int(text, out)) return true;
    return parse_iso8601(text, out);
}

std::size_t to_samples(Millis d, Millis interval, std::string_view what) {
    if (interval.count() <= 0) throw InvalidArgument("sampling interval must be positive");
    if (d.count() <= 0 || d.count() % interval.count() != 0)
        throw InvalidArgument(std::string(what) + " (" + format_duration(d) +
                              ") is not a positive multiple of the sampling interval (" +
                              format_duration(interval) + ")");
    return static_cast<std::size_t>(d.count() / interval.count());
}

}  // namespace mfcca

#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace leap {

// Non-negative decimal seconds with at most 3 fraction digits, kept exact so
// header times survive round-trips ("1.63" stays "1.63", "3" stays "3").
// Invariant: 0 <= frac_digits <= 3 and millis is representable at that
// precision (millis % 10^(3 - frac_digits) == 0).
struct TimeStamp {
    std::int64_t millis = 0;
    int frac_digits = 0;

    static std::optional<TimeStamp> parse(std::string_view text);
    // Widens frac_digits if millis needs it; used for computed values.
    static TimeStamp from_millis(std::int64_t millis, int frac_digits = 0);
    // Rounds to 3 fraction digits (half away from zero). Negative input clamps to 0.
    static TimeStamp from_seconds(double seconds, int frac_digits = 3);

    double seconds() const { return static_cast<double>(millis) / 1000.0; }

    // Exact textual form, e.g. "0", "3", "1.63", "0.550".
    std::string str() const;
    // Fixed 2-digit rendering used by descriptor comments, e.g. "2.82", "3.00".
    std::string str2() const;

    TimeStamp minus(const TimeStamp& other) const;

    bool operator==(const TimeStamp& other) const = default;
    std::strong_ordering operator<=>(const TimeStamp& other) const {
        return millis <=> other.millis;
    }
};

} // namespace leap

#include "leap/decimal.hpp"

#include <cmath>
#include <cstdio>

namespace leap {

namespace {

int minimal_frac_digits(std::int64_t millis) {
    if (millis % 1000 == 0) return 0;
    if (millis % 100 == 0) return 1;
    if (millis % 10 == 0) return 2;
    return 3;
}

std::int64_t pow10_3(int frac_digits) {
    static const std::int64_t table[4] = {1000, 100, 10, 1};
    return table[frac_digits];
}

} // namespace

std::optional<TimeStamp> TimeStamp::parse(std::string_view text) {
    if (text.empty()) return std::nullopt;
    std::size_t i = 0;
    std::int64_t whole = 0;
    std::size_t digits = 0;
    while (i < text.size() && text[i] >= '0' && text[i] <= '9') {
        if (digits >= 12) return std::nullopt;
        whole = whole * 10 + (text[i] - '0');
        ++i;
        ++digits;
    }
    if (digits == 0) return std::nullopt;
    int frac_digits = 0;
    std::int64_t frac = 0;
    if (i < text.size() && text[i] == '.') {
        ++i;
        while (i < text.size() && text[i] >= '0' && text[i] <= '9') {
            if (frac_digits >= 3) return std::nullopt;
            frac = frac * 10 + (text[i] - '0');
            ++i;
            ++frac_digits;
        }
        if (frac_digits == 0) return std::nullopt;
    }
    if (i != text.size()) return std::nullopt;
    std::int64_t millis = whole * 1000 + frac * pow10_3(frac_digits);
    return TimeStamp{millis, frac_digits};
}

TimeStamp TimeStamp::from_millis(std::int64_t millis, int frac_digits) {
    if (millis < 0) millis = 0;
    int minimum = minimal_frac_digits(millis);
    if (frac_digits < minimum) frac_digits = minimum;
    if (frac_digits > 3) frac_digits = 3;
    return TimeStamp{millis, frac_digits};
}

TimeStamp TimeStamp::from_seconds(double seconds, int frac_digits) {
    if (seconds < 0 || !std::isfinite(seconds)) seconds = 0;
    auto millis = static_cast<std::int64_t>(std::llround(seconds * 1000.0));
    TimeStamp t = from_millis(millis, 0);
    if (t.frac_digits > frac_digits) t = from_millis(millis, frac_digits);
    return t;
}

std::string TimeStamp::str() const {
    std::int64_t whole = millis / 1000;
    std::int64_t frac = millis % 1000;
    char buf[32];
    if (frac_digits == 0) {
        std::snprintf(buf, sizeof buf, "%lld", static_cast<long long>(whole));
    } else {
        std::snprintf(buf, sizeof buf, "%lld.%0*lld", static_cast<long long>(whole),
                      frac_digits, static_cast<long long>(frac / pow10_3(frac_digits)));
    }
    return buf;
}

std::string TimeStamp::str2() const {
    std::int64_t centis = (millis + 5) / 10;
    char buf[32];
    std::snprintf(buf, sizeof buf, "%lld.%02lld", static_cast<long long>(centis / 100),
                  static_cast<long long>(centis % 100));
    return buf;
}

TimeStamp TimeStamp::minus(const TimeStamp& other) const {
    return from_millis(millis - other.millis, 0);
}

} // namespace leap

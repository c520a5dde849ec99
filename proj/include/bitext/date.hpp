#ifndef BITEXT_DATE_HPP
#define BITEXT_DATE_HPP

#include <cstdint>
#include <cstdio>
#include <string>

namespace bitext {

struct Date {
    int year = 0;
    int month = 0;  // 1..12
    int day = 0;    // 1..31

    bool operator==(const Date&) const = default;
};

/// Days since the civil epoch 1970-01-01 (Howard Hinnant's algorithm).
inline int64_t days_from_civil(const Date& d) {
    int y = d.year;
    const int m = d.month;
    y -= m <= 2;
    const int era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = (153u * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d.day - 1;
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return int64_t(era) * 146097 + int64_t(doe) - 719468;
}

inline int64_t days_between(const Date& a, const Date& b) {
    int64_t diff = days_from_civil(a) - days_from_civil(b);
    return diff < 0 ? -diff : diff;
}

inline std::string format_date(const Date& d) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02d-%02d", d.year, d.month, d.day);
    return buf;
}

}  // namespace bitext

#endif  // BITEXT_DATE_HPP

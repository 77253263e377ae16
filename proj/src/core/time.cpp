#include "xdf/core/time.hpp"

#include "xdf/core/error.hpp"

#include <array>
#include <charconv>
#include <cstdio>

namespace xdf {

namespace {

int parse_int(std::string_view text, const char* what) {
    int value = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || ptr != text.data() + text.size()) {
        raise(Errc::io_error, std::string("expected number for ") + what + ", got '" + std::string(text) + "'");
    }
    return value;
}

// Civil calendar conversions after Howard Hinnant's algorithms.
long days_from_civil(int y, unsigned m, unsigned d) {
    y -= m <= 2;
    const int era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return static_cast<long>(era) * 146097 + static_cast<long>(doe) - 719468;
}

std::array<int, 3> civil_from_days(long z) {
    z += 719468;
    const long era = (z >= 0 ? z : z - 146096) / 146097;
    const unsigned doe = static_cast<unsigned>(z - era * 146097);
    const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    const long y = static_cast<long>(yoe) + era * 400;
    const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const unsigned mp = (5 * doy + 2) / 153;
    const unsigned d = doy - (153 * mp + 2) / 5 + 1;
    const unsigned m = mp + (mp < 10 ? 3 : -9);
    return {static_cast<int>(y + (m <= 2)), static_cast<int>(m), static_cast<int>(d)};
}

} // namespace

Month::Month(int year, int month) : index_(year * 12 + month - 1) {
    if (month < 1 || month > 12) {
        raise(Errc::io_error, "month out of range: " + std::to_string(month));
    }
}

Month Month::parse(std::string_view text) {
    if (text.size() != 7 || text[4] != '-') {
        raise(Errc::io_error, "expected YYYY-MM, got '" + std::string(text) + "'");
    }
    return Month(parse_int(text.substr(0, 4), "year"), parse_int(text.substr(5, 2), "month"));
}

Month Month::plus_months(int n) const {
    return Month(index_ + n);
}

Date Month::first_day() const {
    return Date(year(), month_of_year(), 1);
}

Date Month::mid_day() const {
    return Date(year(), month_of_year(), 15);
}

std::string Month::str() const {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%04d-%02d", year(), month_of_year());
    return buf;
}

Date::Date(int year, int month, int day)
    : days_(days_from_civil(year, static_cast<unsigned>(month), static_cast<unsigned>(day))) {
    if (month < 1 || month > 12 || day < 1 || day > 31) {
        raise(Errc::io_error, "date out of range");
    }
}

Date Date::parse(std::string_view text) {
    if (text.size() != 10 || text[4] != '-' || text[7] != '-') {
        raise(Errc::io_error, "expected YYYY-MM-DD, got '" + std::string(text) + "'");
    }
    return Date(parse_int(text.substr(0, 4), "year"), parse_int(text.substr(5, 2), "month"),
                parse_int(text.substr(8, 2), "day"));
}

Date Date::from_days(long days) {
    Date d;
    d.days_ = days;
    return d;
}

Month Date::month() const {
    auto [y, m, d] = civil_from_days(days_);
    (void)d;
    return Month(y, m);
}

std::string Date::str() const {
    auto [y, m, d] = civil_from_days(days_);
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%04d-%02d-%02d", y, m, d);
    return buf;
}

} // namespace xdf

#pragma once

#include <compare>
#include <string>
#include <string_view>

namespace xdf {

class Date;

/// Calendar month, the base time unit of the forecasting side.
/// Internally a flat index (year * 12 + month - 1) so lag arithmetic is plain
/// integer math.
class Month {
public:
    Month() : index_(0) {}
    Month(int year, int month);

    /// Parses "YYYY-MM".
    static Month parse(std::string_view text);

    int year() const { return index_ >= 0 ? index_ / 12 : -((-index_ + 11) / 12); }
    int month_of_year() const { return index_ - year() * 12 + 1; }
    int index() const { return index_; }

    Month plus_months(int n) const;
    int months_until(Month later) const { return later.index_ - index_; }

    /// First calendar day of the month.
    Date first_day() const;
    /// Day 15, used as the anchor when a monthly reference point needs a
    /// day-granular window around it.
    Date mid_day() const;

    std::string str() const;

    auto operator<=>(const Month&) const = default;

private:
    explicit Month(int index) : index_(index) {}
    int index_;
};

/// Calendar day (proleptic Gregorian), stored as days since 1970-01-01.
/// Media events live at this granularity; forecasting entities use Month.
class Date {
public:
    Date() : days_(0) {}
    Date(int year, int month, int day);

    /// Parses "YYYY-MM-DD".
    static Date parse(std::string_view text);
    static Date from_days(long days);

    long days_since_epoch() const { return days_; }
    Date plus_days(int n) const { return from_days(days_ + n); }
    long operator-(Date other) const { return days_ - other.days_; }

    Month month() const;
    std::string str() const;

    auto operator<=>(const Date&) const = default;

private:
    long days_;
};

} // namespace xdf

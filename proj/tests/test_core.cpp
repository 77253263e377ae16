#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "test_helpers.hpp"

#include "xdf/core/parallel.hpp"
#include "xdf/core/rng.hpp"
#include "xdf/core/text.hpp"
#include "xdf/core/time.hpp"

#include <cmath>

using namespace xdf;

TEST_CASE("month arithmetic and parsing") {
    Month m = Month::parse("2020-06");
    CHECK(m.year() == 2020);
    CHECK(m.month_of_year() == 6);
    CHECK(m.plus_months(-15).str() == "2019-03");
    CHECK(m.plus_months(7).str() == "2021-01");
    CHECK(Month(2019, 12) < Month(2020, 1));
    CHECK(Month::parse("2020-06").mid_day().str() == "2020-06-15");
    helpers::expect_error(Errc::io_error, [] { Month::parse("2020/06"); });
    helpers::expect_error(Errc::io_error, [] { Month::parse("2020-13"); });
}

TEST_CASE("date arithmetic round trips") {
    Date d = Date::parse("2020-02-29");
    CHECK(d.str() == "2020-02-29");
    CHECK(d.plus_days(1).str() == "2020-03-01");
    CHECK(d.plus_days(-29).str() == "2020-01-31");
    CHECK(Date(2020, 3, 1) - Date(2020, 2, 1) == 29);
    CHECK(Date(2019, 7, 14).month().str() == "2019-07");
    helpers::expect_error(Errc::io_error, [] { Date::parse("2019-7-14"); });
}

TEST_CASE("tokenizer lowercases and splits on non-letters") {
    auto tokens = tokenize_alpha("Car sales surged 12%; managers' outlook—strong.");
    CHECK(tokens == std::vector<std::string>{"car", "sales", "surged", "managers", "outlook",
                                             "strong"});
    CHECK(tokenize_alpha("123 456").empty());
}

TEST_CASE("phrase matching is whole-phrase and boundary aware") {
    CHECK(contains_phrase("strong car demand ahead", "car demand"));
    CHECK_FALSE(contains_phrase("scar demands attention", "car demand"));
    CHECK(contains_phrase("car demand", "car demand"));
    CHECK_FALSE(contains_phrase("cars demanded", "car demand"));
    CHECK(contains_phrase("purchase managers' index rose", "purchase managers' index"));
}

TEST_CASE("keyed gaussians are order independent and well distributed") {
    const std::uint64_t stream = derive_seed(42, {7});
    CHECK(keyed_gaussian(stream, 5) == keyed_gaussian(stream, 5));
    CHECK(keyed_gaussian(stream, 5) != keyed_gaussian(stream, 6));

    double sum = 0.0;
    double sq = 0.0;
    const int n = 20000;
    for (int i = 0; i < n; ++i) {
        const double g = keyed_gaussian(stream, static_cast<std::uint64_t>(i));
        sum += g;
        sq += g * g;
    }
    const double mean = sum / n;
    const double stddev = std::sqrt(sq / n - mean * mean);
    CHECK(std::abs(mean) < 0.05);
    CHECK(stddev == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("parallel for_each_index matches serial and propagates the first error") {
    std::vector<double> serial(1000);
    std::vector<double> parallel(1000);
    auto work = [](std::size_t i) { return std::sqrt(static_cast<double>(i)) * 1.7; };
    for_each_index(serial.size(), ExecPolicy::serial, [&](std::size_t i) { serial[i] = work(i); });
    for_each_index(parallel.size(), ExecPolicy::parallel,
                   [&](std::size_t i) { parallel[i] = work(i); });
    CHECK(serial == parallel);

    for (auto policy : {ExecPolicy::serial, ExecPolicy::parallel}) {
        try {
            for_each_index(100, policy, [&](std::size_t i) {
                if (i >= 40) {
                    raise(Errc::config_error, "boom at " + std::to_string(i));
                }
            });
            FAIL_CHECK("no exception");
        } catch (const Error& e) {
            CHECK(std::string(e.what()).find("boom at 40") != std::string::npos);
        }
    }
}

TEST_CASE("blocked iteration covers the range exactly once") {
    std::vector<int> hits(1000, 0);
    for_each_block(hits.size(), 128, ExecPolicy::parallel, [&](std::size_t, std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            ++hits[i];
        }
    });
    CHECK(std::count(hits.begin(), hits.end(), 1) == 1000);
}

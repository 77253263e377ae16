#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "test_helpers.hpp"

#include "xdf/media/events.hpp"
#include "xdf/media/keywords.hpp"

#include "xdf/core/text.hpp"

#include <algorithm>

using namespace xdf;
using namespace xdf::media;

namespace {

forecast::FeatureSpec spec_with(const std::string& id, std::vector<std::string> keywords) {
    forecast::FeatureSpec spec;
    spec.id = id;
    spec.lags = {1};
    spec.mers_keywords = std::move(keywords);
    spec.abstraction_leaf = "RPD";
    return spec;
}

forecast::FeatureVector instance_with(const std::string& id, std::vector<Month> refs) {
    forecast::FeatureVector fv;
    fv.material = "M1";
    fv.target = Month::parse("2020-06");
    fv.values = {{id, 1.0, std::move(refs)}};
    return fv;
}

FixtureEventBackend three_event_fixture() {
    return FixtureEventBackend({
        {"ev1", Date::parse("2020-02-10"), "Factory output steady", "Production held firm.", "wire"},
        {"ev2", Date::parse("2020-03-12"), "Car demand accelerates",
         "Dealers saw car demand rise across the market.", "wire"},
        {"ev3", Date::parse("2020-04-20"), "Car demand cools", "Car demand slipped in spring.", "wire"},
    });
}

} // namespace

TEST_CASE("one query per reference month, centered with the closeness window") {
    const std::vector<forecast::FeatureSpec> specs = {spec_with("D", {"economic forecast"})};
    const std::vector<std::pair<std::string, double>> ranked = {{"D", 1.2}};
    auto instance = instance_with("D", {Month::parse("2019-03"), Month::parse("2020-03")});
    auto queries = build_queries(ranked, specs, instance, 15);
    REQUIRE(queries.size() == 2);
    CHECK(queries[0].reference.str() == "2019-03");
    CHECK(queries[0].start.str() == "2019-02-28");
    CHECK(queries[0].end.str() == "2019-03-30");
    CHECK(queries[1].reference.str() == "2020-03");
    CHECK(queries[1].start.str() == "2020-02-29");
    CHECK(queries[1].end.str() == "2020-03-30");
    CHECK(queries[0].feature_id == "D");
}

TEST_CASE("keyword reference expansion carries another feature's list") {
    auto specs = forecast::load_feature_specs(helpers::fixtures_dir() / "feature_specs.json");
    auto j = std::find_if(specs.begin(), specs.end(),
                          [](const forecast::FeatureSpec& s) { return s.id == "J"; });
    REQUIRE(j != specs.end());
    const std::vector<std::string> expected = {
        "unemployment rate",       "unemployment numbers", "unemployment report",
        "employment growth",       "long-term unemployment",
        "car sales demand",        "new car sales",        "vehicle sales",
        "car demand",              "automotive industry",
    };
    CHECK(j->mers_keywords == expected);
}

TEST_CASE("no ranked features means no queries") {
    const std::vector<forecast::FeatureSpec> specs = {spec_with("E", {"x"})};
    auto instance = instance_with("E", {Month::parse("2020-05")});
    CHECK(build_queries({}, specs, instance, 15).empty());
}

TEST_CASE("a ranked feature without spec or references is unknown") {
    const std::vector<forecast::FeatureSpec> specs = {spec_with("E", {"x"})};
    auto instance = instance_with("E", {Month::parse("2020-05")});
    const std::vector<std::pair<std::string, double>> ranked = {{"Z", 1.0}};
    helpers::expect_error(Errc::unknown_feature,
                          [&] { build_queries(ranked, specs, instance, 15); });
}

TEST_CASE("fixture backend filters by window and whole-phrase keyword") {
    auto backend = three_event_fixture();
    EventQuery query;
    query.keywords = {"car demand"};
    query.start = Date::parse("2020-03-01");
    query.end = Date::parse("2020-03-31");
    auto events = retrieve_events(query, backend, 10);
    REQUIRE(events.size() == 1);
    CHECK(events[0].id == "ev2");

    query.keywords = {"semiconductor shortage"};
    CHECK(retrieve_events(query, backend, 10).empty());

    query.keywords = {"car demand"};
    query.start = Date::parse("2021-01-01");
    query.end = Date::parse("2021-02-01");
    CHECK(retrieve_events(query, backend, 10).empty());
}

TEST_CASE("retrieved events respect window, matching and ordering invariants") {
    auto backend = three_event_fixture();
    EventQuery query;
    query.keywords = {"car demand"};
    query.start = Date::parse("2020-01-01");
    query.end = Date::parse("2020-12-31");
    auto events = retrieve_events(query, backend, 10);
    REQUIRE(events.size() == 2);
    for (std::size_t i = 0; i < events.size(); ++i) {
        CHECK(query.start <= events[i].date);
        CHECK(events[i].date <= query.end);
        const auto haystack = to_lower(events[i].title + " " + events[i].body);
        CHECK(contains_phrase(haystack, "car demand"));
        if (i > 0) {
            CHECK(events[i - 1].date <= events[i].date);
        }
    }
    CHECK(retrieve_events(query, backend, 1).size() == 1); // cap applies
    CHECK(retrieve_events(query, backend, 0).empty());
}

TEST_CASE("noun lemmatization rules") {
    CHECK(lemmatize_noun("sales") == "sale");
    CHECK(lemmatize_noun("cars") == "car");
    CHECK(lemmatize_noun("factories") == "factory");
    CHECK(lemmatize_noun("buses") == "bus");
    CHECK(lemmatize_noun("glasses") == "glass");
    CHECK(lemmatize_noun("boxes") == "box");
    CHECK(lemmatize_noun("people") == "person");
    CHECK(lemmatize_noun("glass") == "glass"); // -ss untouched
    CHECK(lemmatize_noun("demand") == "demand");
}

TEST_CASE("keyword extraction lemmatizes nouns and aggregates counts") {
    const std::unordered_set<std::string> stopwords = {"as", "of", "the"};
    const std::unordered_set<std::string> lexicon = {"car", "sale"};
    std::vector<MediaEvent> events = {
        {"e1", Date::parse("2020-01-01"), "", "Car sales surged as sales of cars rose", "w"},
    };
    auto stats = extract_keywords(events, stopwords, lexicon);
    REQUIRE(stats.size() == 2);
    CHECK(stats[0].lemma == "car"); // frequency tie, lemma ascending
    CHECK(stats[0].frequency == 2);
    CHECK(stats[1].lemma == "sale");
    CHECK(stats[1].frequency == 2);
    CHECK(stats[0].supporting_event_ids == std::vector<std::string>{"e1"});
}

TEST_CASE("keyword extraction edge cases") {
    const std::unordered_set<std::string> stopwords = {"the", "and"};
    const std::unordered_set<std::string> lexicon = {"car"};
    CHECK(extract_keywords(std::vector<MediaEvent>{}, stopwords, lexicon).empty());
    std::vector<MediaEvent> only_stopwords = {
        {"e1", Date::parse("2020-01-01"), "the and", "and the", "w"}};
    CHECK(extract_keywords(only_stopwords, stopwords, lexicon).empty());
}

TEST_CASE("keyword lemmas satisfy the output contract") {
    const auto stopwords = xdf::load_token_set(helpers::fixtures_dir() / "stopwords.txt");
    const auto lexicon = xdf::load_token_set(helpers::fixtures_dir() / "noun_lexicon.txt");
    std::vector<MediaEvent> events = {
        {"e1", Date::parse("2019-03-11"), "New car sales climb",
         "Dealers report that new car sales and overall car demand strengthened; managers saw "
         "stronger factory orders and GDP growth.",
         "wire"},
    };
    auto stats = extract_keywords(events, stopwords, lexicon);
    REQUIRE_FALSE(stats.empty());
    for (const auto& stat : stats) {
        CHECK(stat.frequency >= 1);
        CHECK(stopwords.count(stat.lemma) == 0);
        CHECK(lexicon.count(stat.lemma) == 1);
        CHECK(stat.lemma == to_lower(stat.lemma));
        for (char c : stat.lemma) {
            CHECK(std::isalpha(static_cast<unsigned char>(c)));
        }
    }
}

TEST_CASE("keyword extraction is order invariant") {
    const std::unordered_set<std::string> stopwords;
    const std::unordered_set<std::string> lexicon = {"car", "sale", "market", "dealer"};
    std::vector<MediaEvent> events = {
        {"e1", Date::parse("2020-01-01"), "Car sales", "dealers in the market", "w"},
        {"e2", Date::parse("2020-01-02"), "Market report", "car sales by dealers", "w"},
        {"e3", Date::parse("2020-01-03"), "Dealer survey", "cars everywhere", "w"},
    };
    auto forward = extract_keywords(events, stopwords, lexicon);
    std::reverse(events.begin(), events.end());
    auto backward = extract_keywords(events, stopwords, lexicon);
    REQUIRE(forward.size() == backward.size());
    for (std::size_t i = 0; i < forward.size(); ++i) {
        CHECK(forward[i].lemma == backward[i].lemma);
        CHECK(forward[i].frequency == backward[i].frequency);
        CHECK(forward[i].supporting_event_ids == backward[i].supporting_event_ids);
    }
}

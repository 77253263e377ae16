#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "oracle_transport.hpp"
#include "test_helpers.hpp"

#include "xdf/core/rng.hpp"
#include "xdf/recommend/embedding.hpp"
#include "xdf/recommend/nbow.hpp"
#include "xdf/recommend/rank.hpp"
#include "xdf/recommend/wmd.hpp"

#include <cmath>
#include <cstring>

using namespace xdf;
using namespace xdf::recommend;

namespace {

void append_le_float(std::string& out, float value) {
    std::uint32_t word;
    std::memcpy(&word, &value, 4);
    out.push_back(static_cast<char>(word & 0xff));
    out.push_back(static_cast<char>((word >> 8) & 0xff));
    out.push_back(static_cast<char>((word >> 16) & 0xff));
    out.push_back(static_cast<char>((word >> 24) & 0xff));
}

std::string two_token_fixture() {
    std::string bytes = "2 3\n";
    bytes += "cat ";
    for (float v : {1.0f, 0.0f, 0.0f}) {
        append_le_float(bytes, v);
    }
    bytes += "\n";
    bytes += "dog ";
    for (float v : {0.0f, 1.0f, 0.0f}) {
        append_le_float(bytes, v);
    }
    bytes += "\n";
    return bytes;
}

std::string tok(std::size_t i) {
    std::string name = "w";
    name.push_back(static_cast<char>('a' + i / 26 % 26));
    name.push_back(static_cast<char>('a' + i % 26));
    return name;
}

EmbeddingTable random_table(std::size_t vocab, std::size_t dimension, std::uint64_t seed) {
    EmbeddingTable table;
    table.dimension = dimension;
    for (std::size_t i = 0; i < vocab; ++i) {
        Rng rng(derive_seed(seed, {i}));
        std::vector<float> vec(dimension);
        for (auto& v : vec) {
            v = static_cast<float>(rng.next_gaussian());
        }
        table.entries.emplace(tok(i), std::move(vec));
    }
    return table;
}

DocumentBag random_bag(const EmbeddingTable& table, std::size_t max_tokens, Rng& rng) {
    const std::size_t vocab = table.entries.size();
    const std::size_t count = 1 + rng.next_below(max_tokens);
    std::map<std::string, double> weights;
    while (weights.size() < count) {
        weights[tok(rng.next_below(vocab))] = 0.05 + rng.next_unit();
    }
    DocumentBag bag;
    double total = 0.0;
    for (const auto& [token, weight] : weights) {
        total += weight;
    }
    for (const auto& [token, weight] : weights) {
        bag.tokens.push_back(token);
        bag.weights.push_back(weight / total);
    }
    return bag;
}

double oracle_wmd(const DocumentBag& a, const DocumentBag& b, const EmbeddingTable& table) {
    const auto cost = pairwise_token_cost(a, b, table);
    return oracle::brute_force_transport(a.weights, b.weights, cost, a.tokens.size(),
                                         b.tokens.size());
}

} // namespace

TEST_CASE("word2vec binary fixture parses bit-exactly") {
    const auto table = parse_embeddings(two_token_fixture());
    CHECK(table.dimension == 3);
    REQUIRE(table.entries.size() == 2);
    CHECK(*table.find("cat") == std::vector<float>{1.0f, 0.0f, 0.0f});
    CHECK(*table.find("dog") == std::vector<float>{0.0f, 1.0f, 0.0f});
}

TEST_CASE("parser errors carry the stated codes") {
    helpers::expect_error(Errc::malformed_header, [] { parse_embeddings(""); });
    helpers::expect_error(Errc::malformed_header, [] { parse_embeddings("nonsense\n"); });
    helpers::expect_error(Errc::malformed_header, [] { parse_embeddings("2\n"); });

    std::string truncated = two_token_fixture();
    truncated.replace(0, 3, "3 3"); // claims one more entry than present
    helpers::expect_error(Errc::truncated_entry, [&] { parse_embeddings(truncated); });

    std::string cut = two_token_fixture();
    cut.resize(cut.size() - 6); // cut into dog's vector
    helpers::expect_error(Errc::truncated_entry, [&] { parse_embeddings(cut); });

    std::string duplicated = "2 3\n";
    for (int i = 0; i < 2; ++i) {
        duplicated += "cat ";
        for (float v : {1.0f, 2.0f, 3.0f}) {
            append_le_float(duplicated, v);
        }
        duplicated += "\n";
    }
    helpers::expect_error(Errc::duplicate_token, [&] { parse_embeddings(duplicated); });
}

TEST_CASE("truncated-entry errors name the byte offset") {
    std::string cut = two_token_fixture();
    cut.resize(cut.size() - 6);
    try {
        parse_embeddings(cut);
        FAIL_CHECK("expected TruncatedEntry");
    } catch (const Error& e) {
        CHECK(std::string(e.what()).find("byte") != std::string::npos);
    }
}

TEST_CASE("serialize then parse is the identity on tables") {
    const auto table = random_table(40, 16, 99);
    const auto round_tripped = parse_embeddings(serialize_embeddings(table));
    CHECK(round_tripped.dimension == table.dimension);
    REQUIRE(round_tripped.entries.size() == table.entries.size());
    for (const auto& [token, vec] : table.entries) {
        const auto* other = round_tripped.find(token);
        REQUIRE(other != nullptr);
        CHECK(*other == vec); // bit-exact floats
    }
}

TEST_CASE("the bundled embedding fixture loads and covers the corpus vocabulary") {
    const auto table = load_embeddings(helpers::fixtures_dir() / "embeddings.bin");
    CHECK(table.dimension == 16);
    CHECK(table.entries.size() >= 200);
    for (const char* token : {"car", "vehicle", "gdp", "unemployment", "sale", "index"}) {
        CHECK(table.find(token) != nullptr);
    }
}

TEST_CASE("nbow counts, folds case and drops stopwords") {
    const auto table = parse_embeddings(two_token_fixture());
    const std::unordered_set<std::string> stopwords = {"the"};
    auto bag = to_nbow("cat cat dog", table, stopwords);
    REQUIRE(bag.tokens == std::vector<std::string>{"cat", "dog"});
    CHECK(bag.weights[0] == doctest::Approx(2.0 / 3.0));
    CHECK(bag.weights[1] == doctest::Approx(1.0 / 3.0));

    bag = to_nbow("Dog CAT dog", table, stopwords);
    CHECK(bag.weights[0] == doctest::Approx(1.0 / 3.0)); // cat
    CHECK(bag.weights[1] == doctest::Approx(2.0 / 3.0)); // dog

    helpers::expect_error(Errc::empty_bag, [&] { to_nbow("unicorn tokens only", table, stopwords); });
    helpers::expect_error(Errc::empty_bag, [&] { to_nbow("the the", table, stopwords); });
}

TEST_CASE("wmd of a bag with itself is zero") {
    const auto table = random_table(30, 8, 5);
    Rng rng(1);
    for (int i = 0; i < 10; ++i) {
        auto bag = random_bag(table, 6, rng);
        CHECK(wmd(bag, bag, table) == doctest::Approx(0.0).epsilon(1e-12));
    }
}

TEST_CASE("distinct bags are strictly apart") {
    const auto table = random_table(30, 8, 6);
    Rng rng(2);
    for (int i = 0; i < 10; ++i) {
        auto a = random_bag(table, 5, rng);
        auto b = random_bag(table, 5, rng);
        if (a == b) {
            continue;
        }
        CHECK(wmd(a, b, table) > 1e-9);
    }
    // same tokens, different weights: still strictly positive
    DocumentBag p{{tok(0), tok(1)}, {0.5, 0.5}};
    DocumentBag q{{tok(0), tok(1)}, {0.9, 0.1}};
    CHECK(wmd(p, q, table) > 1e-9);
}

TEST_CASE("singleton bags transport all mass along one edge") {
    const auto table = parse_embeddings(two_token_fixture());
    DocumentBag a{{"cat"}, {1.0}};
    DocumentBag b{{"dog"}, {1.0}};
    CHECK(wmd(a, b, table) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
    CHECK(rwmd_lower_bound(a, b, table) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
}

TEST_CASE("2x2 transport equals the basic-solution enumeration") {
    EmbeddingTable table;
    table.dimension = 2;
    table.entries = {{"p", {0.0f, 0.0f}},
                     {"q", {1.0f, 0.0f}},
                     {"r", {0.0f, 2.0f}},
                     {"s", {3.0f, 1.0f}}};
    DocumentBag a{{"p", "q"}, {0.3, 0.7}};
    DocumentBag b{{"r", "s"}, {0.6, 0.4}};
    CHECK(wmd(a, b, table) == doctest::Approx(oracle_wmd(a, b, table)).epsilon(1e-9));
}

TEST_CASE("exact solver matches brute force on random small bags") {
    const auto table = random_table(24, 6, 17);
    Rng rng(23);
    for (int i = 0; i < 60; ++i) {
        auto a = random_bag(table, 4, rng);
        auto b = random_bag(table, 4, rng);
        const double exact = wmd(a, b, table);
        const double brute = oracle_wmd(a, b, table);
        CHECK(exact == doctest::Approx(brute).epsilon(1e-9));
    }
}

TEST_CASE("transport plans satisfy the marginals with no negative mass") {
    const auto table = random_table(24, 6, 31);
    Rng rng(37);
    for (int i = 0; i < 20; ++i) {
        auto a = random_bag(table, 8, rng);
        auto b = random_bag(table, 8, rng);
        auto plan = wmd_plan(a, b, table);
        for (double flow : plan.flow) {
            CHECK(flow >= 0.0);
        }
        for (std::size_t r = 0; r < plan.rows; ++r) {
            double row_sum = 0.0;
            for (std::size_t c = 0; c < plan.cols; ++c) {
                row_sum += plan.at(r, c);
            }
            CHECK(row_sum == doctest::Approx(a.weights[r]).epsilon(1e-12));
        }
        for (std::size_t c = 0; c < plan.cols; ++c) {
            double col_sum = 0.0;
            for (std::size_t r = 0; r < plan.rows; ++r) {
                col_sum += plan.at(r, c);
            }
            CHECK(col_sum == doctest::Approx(b.weights[c]).epsilon(1e-12));
        }
    }
}

TEST_CASE("the solver survives degenerate geometry") {
    // several tokens sharing one embedding point: zero-cost cells and ties
    EmbeddingTable table;
    table.dimension = 2;
    table.entries = {{"a", {0.0f, 0.0f}},
                     {"b", {0.0f, 0.0f}},
                     {"c", {1.0f, 0.0f}},
                     {"d", {1.0f, 0.0f}},
                     {"e", {0.5f, 0.5f}}};
    DocumentBag x{{"a", "c", "e"}, {0.25, 0.25, 0.5}};
    DocumentBag y{{"b", "d", "e"}, {0.25, 0.25, 0.5}};
    // every token has a zero-cost partner, so the optimum is 0
    CHECK(wmd(x, y, table) == doctest::Approx(0.0).epsilon(1e-12));

    DocumentBag z{{"b", "d"}, {0.5, 0.5}};
    const auto cost = pairwise_token_cost(x, z, table);
    const double brute = oracle::brute_force_transport(x.weights, z.weights, cost, 3, 2);
    CHECK(wmd(x, z, table) == doctest::Approx(brute).epsilon(1e-9));

    // equal masses across the board invite simplex-style degeneracy
    DocumentBag u{{"a", "c", "e"}, {1.0 / 3, 1.0 / 3, 1.0 / 3}};
    DocumentBag v{{"b", "d", "e"}, {1.0 / 3, 1.0 / 3, 1.0 / 3}};
    CHECK(wmd(u, v, table) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(rwmd_lower_bound(u, v, table) <= wmd(u, v, table) + 1e-12);
}

TEST_CASE("wmd behaves like a metric on random instances") {
    const auto table = random_table(20, 5, 43);
    Rng rng(47);
    for (int i = 0; i < 25; ++i) {
        auto a = random_bag(table, 5, rng);
        auto b = random_bag(table, 5, rng);
        auto c = random_bag(table, 5, rng);
        const double ab = wmd(a, b, table);
        const double ba = wmd(b, a, table);
        const double ac = wmd(a, c, table);
        const double cb = wmd(c, b, table);
        CHECK(ab == doctest::Approx(ba).epsilon(1e-9));
        CHECK(ab <= ac + cb + 1e-9);
        CHECK(ab >= 0.0);
    }
}

TEST_CASE("rwmd never exceeds the exact distance") {
    const auto table = random_table(30, 8, 53);
    Rng rng(59);
    for (int i = 0; i < 300; ++i) {
        auto a = random_bag(table, 6, rng);
        auto b = random_bag(table, 6, rng);
        CHECK(rwmd_lower_bound(a, b, table) <= wmd(a, b, table) + 1e-12);
    }
    auto a = random_bag(table, 6, rng);
    CHECK(rwmd_lower_bound(a, a, table) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("identical text ranks at distance zero") {
    const auto table = random_table(30, 8, 61);
    const std::unordered_set<std::string> stopwords;
    const std::string text = tok(1) + " " + tok(2) + " " + tok(3);
    const std::vector<DatasetMetadata> candidates = {{"d1", text, "", "", ""}};
    auto query = to_nbow(text, table, stopwords);
    auto ranked = rank_datasets(query, candidates, table, stopwords, {});
    REQUIRE(ranked.size() == 1);
    CHECK(ranked[0].id == "d1");
    CHECK(ranked[0].distance == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("a candidate sharing the query tokens beats a disjoint one") {
    const auto table = random_table(30, 8, 67);
    const std::unordered_set<std::string> stopwords;
    const std::string near_text = tok(1) + " " + tok(2) + " " + tok(3) + " " + tok(4);
    const std::string far_text = tok(20) + " " + tok(21) + " " + tok(22);
    const std::vector<DatasetMetadata> candidates = {
        {"far", far_text, "", "", ""},
        {"near", near_text, "", "", ""},
    };
    auto query = to_nbow(near_text, table, stopwords);
    auto ranked = rank_datasets(query, candidates, table, stopwords, {});
    REQUIRE(ranked.size() == 2);
    CHECK(ranked[0].id == "near");
    // double-check with the exact distances
    auto near_bag = to_nbow(near_text, table, stopwords);
    auto far_bag = to_nbow(far_text, table, stopwords);
    CHECK(wmd(query, near_bag, table) < wmd(query, far_bag, table));
}

TEST_CASE("out-of-vocabulary candidates are skipped, all-OOV is an error") {
    const auto table = random_table(10, 4, 71);
    const std::unordered_set<std::string> stopwords;
    auto query = to_nbow(tok(1) + " " + tok(2), table, stopwords);
    const std::vector<DatasetMetadata> mixed = {{"bad", "zebra xylophone", "", "", ""},
                                                {"good", tok(1) + " " + tok(3), "", "", ""}};
    auto ranked = rank_datasets(query, mixed, table, stopwords, {});
    REQUIRE(ranked.size() == 1);
    CHECK(ranked[0].id == "good");

    const std::vector<DatasetMetadata> all_bad = {{"bad", "zebra xylophone", "", "", ""}};
    helpers::expect_error(Errc::no_rankable_candidates,
                          [&] { rank_datasets(query, all_bad, table, stopwords, {}); });
}

TEST_CASE("pruned and unpruned rankings are identical on a 100-candidate fixture") {
    const auto table = random_table(60, 10, 73);
    const std::unordered_set<std::string> stopwords;
    Rng rng(79);
    std::vector<DatasetMetadata> candidates;
    for (int i = 0; i < 100; ++i) {
        std::string text;
        const int tokens = 3 + static_cast<int>(rng.next_below(6));
        for (int t = 0; t < tokens; ++t) {
            text += tok(rng.next_below(60)) + " ";
        }
        candidates.push_back({"d" + std::to_string(100 + i), text, text, "", ""});
    }
    auto query = to_nbow(tok(1) + " " + tok(5) + " " + tok(9) + " " + tok(13) + " " + tok(17),
                         table, stopwords);

    RankOptions pruned_options;
    pruned_options.prune = true;
    RankOptions unpruned_options;
    unpruned_options.prune = false;
    auto pruned = rank_datasets(query, candidates, table, stopwords, pruned_options);
    auto unpruned = rank_datasets(query, candidates, table, stopwords, unpruned_options);
    REQUIRE(pruned.size() == unpruned.size());
    for (std::size_t i = 0; i < pruned.size(); ++i) {
        CHECK(pruned[i].id == unpruned[i].id);
        CHECK(pruned[i].distance == unpruned[i].distance);
    }

    // parallel policy agrees bitwise as well
    RankOptions parallel_options;
    parallel_options.policy = ExecPolicy::parallel;
    auto parallel = rank_datasets(query, candidates, table, stopwords, parallel_options);
    REQUIRE(parallel.size() == pruned.size());
    for (std::size_t i = 0; i < pruned.size(); ++i) {
        CHECK(parallel[i].id == pruned[i].id);
        CHECK(parallel[i].distance == pruned[i].distance);
    }
}

TEST_CASE("the fixture dataset backend matches lemmas and phrases") {
    FixtureDatasetBackend backend({
        {"d2", "Monthly vehicle registrations", "counts of new registrations", "", ""},
        {"d1", "GDP statistics", "gross domestic product figures", "", ""},
        {"d3", "Road traffic volumes", "vehicle counts from stations", "", ""},
    });
    // single-word keyword matches via lemmatization: registration ~ registrations
    const std::vector<std::string> single = {"registration"};
    auto hits = backend.query(single, 10);
    REQUIRE(hits.size() == 1);
    CHECK(hits[0].id == "d2");
    // multi-word keyword matches as a whole phrase
    const std::vector<std::string> phrase = {"gross domestic product"};
    hits = backend.query(phrase, 10);
    REQUIRE(hits.size() == 1);
    CHECK(hits[0].id == "d1");
    // results are id-sorted and capped
    const std::vector<std::string> broad = {"vehicle"};
    hits = backend.query(broad, 10);
    REQUIRE(hits.size() == 2);
    CHECK(hits[0].id == "d2");
    CHECK(hits[1].id == "d3");
    CHECK(backend.query(broad, 1).size() == 1);
    const std::vector<std::string> nothing = {"zeppelin"};
    CHECK(backend.query(nothing, 10).empty());
}

TEST_CASE("diversity sampling covers the stated edge cases") {
    // pool smaller than k returns everything in order
    CHECK(diversity_sample_indices(2, 10, 3, 1) == std::vector<std::size_t>{0, 1});
    // determinism
    CHECK(diversity_sample_indices(20, 10, 3, 42) == diversity_sample_indices(20, 10, 3, 42));
    // rank order preserved
    auto sample = diversity_sample_indices(50, 10, 4, 7);
    REQUIRE(sample.size() == 4);
    CHECK(std::is_sorted(sample.begin(), sample.end()));
    for (std::size_t index : sample) {
        CHECK(index < 10);
    }
    helpers::expect_error(Errc::empty_input, [] { diversity_sample_indices(0, 10, 3, 1); });
}

TEST_CASE("diversity sampling is uniform over the pool") {
    std::vector<int> hits(10, 0);
    const int draws = 10000;
    for (int s = 0; s < draws; ++s) {
        for (std::size_t index : diversity_sample_indices(10, 10, 3, static_cast<std::uint64_t>(s))) {
            ++hits[index];
        }
    }
    for (int count : hits) {
        const double frequency = static_cast<double>(count) / draws;
        CHECK(frequency > 0.28);
        CHECK(frequency < 0.32);
    }
}

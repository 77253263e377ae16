// Compares the serial and OpenMP paths of the data-parallel kernels on
// synthetic workloads and checks that both produce identical results.

#include "xdf/analyzer/surrogate.hpp"
#include "xdf/core/rng.hpp"
#include "xdf/recommend/rank.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <string>

using namespace xdf;

namespace {

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

std::string bench_token(std::size_t i) {
    std::string suffix;
    suffix.push_back(static_cast<char>('a' + i / 26 % 26));
    suffix.push_back(static_cast<char>('a' + i % 26));
    suffix.push_back(static_cast<char>('a' + i / 676 % 26));
    return "tok" + suffix;
}

recommend::EmbeddingTable synthetic_table(std::size_t vocab, std::size_t dimension) {
    recommend::EmbeddingTable table;
    table.dimension = dimension;
    for (std::size_t i = 0; i < vocab; ++i) {
        const std::string token = bench_token(i);
        Rng rng(derive_seed(11, {i}));
        std::vector<float> vec(dimension);
        for (auto& v : vec) {
            v = static_cast<float>(rng.next_gaussian());
        }
        table.entries.emplace(token, std::move(vec));
    }
    return table;
}

std::vector<recommend::DatasetMetadata> synthetic_candidates(std::size_t count, std::size_t vocab) {
    std::vector<recommend::DatasetMetadata> candidates(count);
    for (std::size_t i = 0; i < count; ++i) {
        Rng rng(derive_seed(12, {i}));
        std::string text;
        for (int t = 0; t < 24; ++t) {
            text += bench_token(rng.next_below(vocab)) + " ";
        }
        candidates[i] = {"D" + std::to_string(1000 + i), text, text, "bench", ""};
    }
    return candidates;
}

void bench_ranking() {
    const auto table = synthetic_table(600, 64);
    const auto candidates = synthetic_candidates(4000, 600);
    const std::unordered_set<std::string> stopwords;
    std::string query_text;
    for (std::size_t i = 0; i < 8; ++i) {
        query_text += bench_token(i) + " ";
    }
    recommend::DocumentBag query = recommend::to_nbow(query_text, table, stopwords);

    recommend::RankOptions serial_options{10, true, ExecPolicy::serial};
    recommend::RankOptions parallel_options{10, true, ExecPolicy::parallel};

    auto start = std::chrono::steady_clock::now();
    const auto serial = recommend::rank_datasets(query, candidates, table, stopwords, serial_options);
    const double serial_time = seconds_since(start);

    start = std::chrono::steady_clock::now();
    const auto parallel =
        recommend::rank_datasets(query, candidates, table, stopwords, parallel_options);
    const double parallel_time = seconds_since(start);

    bool identical = serial.size() == parallel.size();
    for (std::size_t i = 0; identical && i < serial.size(); ++i) {
        identical = serial[i].id == parallel[i].id && serial[i].distance == parallel[i].distance;
    }
    std::printf("%-28s %10.3fs %10.3fs %8.2fx  %s\n", "dataset ranking (4000 cand)", serial_time,
                parallel_time, serial_time / parallel_time, identical ? "identical" : "MISMATCH");
}

void bench_surrogate() {
    const std::size_t d = 13;
    std::vector<double> instance(d, 0.5);
    std::vector<std::string> ids;
    for (std::size_t f = 0; f < d; ++f) {
        ids.push_back(std::string(1, static_cast<char>('A' + f)));
    }
    analyzer::BlackBox box = [](std::span<const double> v) {
        double out = 5.0;
        for (std::size_t f = 0; f < v.size(); ++f) {
            out += (f % 2 == 0 ? 1.5 : -0.75) * v[f] + 0.1 * std::sin(v[f]);
        }
        return out;
    };
    analyzer::AnalyzerConfig config;
    config.n_samples = 120000;
    config.top_k = 4;
    config.seed = 99;

    auto start = std::chrono::steady_clock::now();
    const auto serial = analyzer::analyze(box, instance, ids, config, ExecPolicy::serial);
    const double serial_time = seconds_since(start);

    start = std::chrono::steady_clock::now();
    const auto parallel = analyzer::analyze(box, instance, ids, config, ExecPolicy::parallel);
    const double parallel_time = seconds_since(start);

    const bool identical = serial.coefficients == parallel.coefficients &&
                           serial.intercept == parallel.intercept &&
                           serial.fidelity == parallel.fidelity;
    std::printf("%-28s %10.3fs %10.3fs %8.2fx  %s\n", "surrogate fit (120k samples)", serial_time,
                parallel_time, serial_time / parallel_time, identical ? "identical" : "MISMATCH");
}

} // namespace

int main() {
    std::printf("threads available: %d\n", max_threads());
    std::printf("%-28s %11s %11s %9s\n", "kernel", "serial", "parallel", "speedup");
    bench_ranking();
    bench_surrogate();
    return 0;
}

#pragma once

#include "xdf/core/parallel.hpp"
#include "xdf/recommend/nbow.hpp"

#include <span>
#include <vector>

namespace xdf::recommend {

/// Dense transport plan between two weight vectors.
struct TransportPlan {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> flow; // row-major, rows*cols
    double cost = 0.0;

    double at(std::size_t i, std::size_t j) const { return flow[i * cols + j]; }
};

/// Exact minimum-cost transport: minimize sum_ij T_ij * cost_ij subject to
/// row sums = supply, column sums = demand, T >= 0. Solved by successive
/// shortest augmenting paths with node potentials, which is exact for the
/// balanced transportation problem; instances here are small (bags of at
/// most a few dozen tokens).
TransportPlan solve_transport(std::span<const double> supply, std::span<const double> demand,
                              std::span<const double> cost, std::size_t rows, std::size_t cols);

/// Euclidean distances between the bags' embedding vectors, row-major.
/// Entries are independent, so the parallel policy is bitwise identical.
std::vector<double> pairwise_token_cost(const DocumentBag& a, const DocumentBag& b,
                                        const EmbeddingTable& table,
                                        ExecPolicy policy = ExecPolicy::serial);

/// Word Mover's Distance between two bags over the table.
double wmd(const DocumentBag& a, const DocumentBag& b, const EmbeddingTable& table);

/// Plan included, for feasibility checks.
TransportPlan wmd_plan(const DocumentBag& a, const DocumentBag& b, const EmbeddingTable& table);

/// Relaxed lower bound: each side's mass moves wholly to its nearest
/// counterpart; the larger of the two relaxations. Always <= wmd(a, b),
/// with equality for singleton bags.
double rwmd_lower_bound(const DocumentBag& a, const DocumentBag& b, const EmbeddingTable& table);

} // namespace xdf::recommend

#include "xdf/recommend/wmd.hpp"

#include "xdf/core/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace xdf::recommend {

namespace {

constexpr double kMassEps = 1e-15;
constexpr double kInf = std::numeric_limits<double>::infinity();

double euclidean(std::span<const float> a, std::span<const float> b) {
    double sq = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) {
        const double diff = static_cast<double>(a[k]) - static_cast<double>(b[k]);
        sq += diff * diff;
    }
    return std::sqrt(sq);
}

std::vector<std::span<const float>> resolve_vectors(const DocumentBag& bag, const EmbeddingTable& table) {
    if (bag.tokens.empty()) {
        raise(Errc::empty_bag, "bag has no tokens");
    }
    std::vector<std::span<const float>> vectors;
    vectors.reserve(bag.tokens.size());
    for (const auto& token : bag.tokens) {
        const auto* vec = table.find(token);
        if (vec == nullptr) {
            raise(Errc::empty_bag, "token '" + token + "' missing from embedding table");
        }
        vectors.emplace_back(*vec);
    }
    return vectors;
}

} // namespace

TransportPlan solve_transport(std::span<const double> supply, std::span<const double> demand,
                              std::span<const double> cost, std::size_t rows, std::size_t cols) {
    if (supply.size() != rows || demand.size() != cols || cost.size() != rows * cols) {
        raise(Errc::config_error, "transport problem dimensions disagree");
    }
    TransportPlan plan;
    plan.rows = rows;
    plan.cols = cols;
    plan.flow.assign(rows * cols, 0.0);

    std::vector<double> remaining_supply(supply.begin(), supply.end());
    std::vector<double> remaining_demand(demand.begin(), demand.end());
    std::vector<double> potential(rows + cols, 0.0); // suppliers then consumers

    const std::size_t n_nodes = rows + cols;
    std::vector<double> dist(n_nodes);
    std::vector<int> parent(n_nodes);
    std::vector<bool> done(n_nodes);

    auto total = [](const std::vector<double>& v) {
        double s = 0.0;
        for (double x : v) {
            s += x;
        }
        return s;
    };

    const std::size_t max_rounds = 16 * n_nodes * n_nodes + 64;
    std::size_t rounds = 0;
    while (total(remaining_supply) > kMassEps && total(remaining_demand) > kMassEps) {
        if (++rounds > max_rounds) {
            raise(Errc::config_error, "transport solver failed to converge");
        }
        // Dijkstra on reduced costs from every supplier with remaining mass.
        std::fill(dist.begin(), dist.end(), kInf);
        std::fill(parent.begin(), parent.end(), -1);
        std::fill(done.begin(), done.end(), false);
        for (std::size_t i = 0; i < rows; ++i) {
            if (remaining_supply[i] > kMassEps) {
                dist[i] = 0.0;
            }
        }
        for (std::size_t step = 0; step < n_nodes; ++step) {
            std::size_t u = n_nodes;
            double best = kInf;
            for (std::size_t k = 0; k < n_nodes; ++k) {
                if (!done[k] && dist[k] < best) {
                    best = dist[k];
                    u = k;
                }
            }
            if (u == n_nodes) {
                break;
            }
            done[u] = true;
            if (u < rows) {
                const std::size_t i = u;
                for (std::size_t j = 0; j < cols; ++j) {
                    const double rc =
                        std::max(0.0, cost[i * cols + j] + potential[i] - potential[rows + j]);
                    if (dist[i] + rc < dist[rows + j]) {
                        dist[rows + j] = dist[i] + rc;
                        parent[rows + j] = static_cast<int>(i);
                    }
                }
            } else {
                const std::size_t j = u - rows;
                for (std::size_t i = 0; i < rows; ++i) {
                    if (plan.flow[i * cols + j] <= 0.0) {
                        continue;
                    }
                    const double rc =
                        std::max(0.0, -cost[i * cols + j] + potential[rows + j] - potential[i]);
                    if (dist[rows + j] + rc < dist[i]) {
                        dist[i] = dist[rows + j] + rc;
                        parent[i] = static_cast<int>(rows + j);
                    }
                }
            }
        }
        // nearest consumer that still needs mass
        std::size_t target = cols;
        double best = kInf;
        for (std::size_t j = 0; j < cols; ++j) {
            if (remaining_demand[j] > kMassEps && dist[rows + j] < best) {
                best = dist[rows + j];
                target = j;
            }
        }
        if (target == cols) {
            break; // residual mass below tolerance on one side
        }
        // bottleneck along the parent chain
        double bottleneck = remaining_demand[target];
        std::size_t node = rows + target;
        while (parent[node] >= 0) {
            const auto prev = static_cast<std::size_t>(parent[node]);
            if (node >= rows) {
                // forward arc prev(supplier) -> node(consumer): unlimited
            } else {
                // backward arc prev(consumer) -> node(supplier): limited by flow
                bottleneck = std::min(bottleneck, plan.flow[node * cols + (prev - rows)]);
            }
            node = prev;
        }
        bottleneck = std::min(bottleneck, remaining_supply[node]);
        const std::size_t origin = node;
        if (bottleneck <= 0.0) {
            break;
        }
        // apply the augmentation
        node = rows + target;
        while (parent[node] >= 0) {
            const auto prev = static_cast<std::size_t>(parent[node]);
            if (node >= rows) {
                plan.flow[prev * cols + (node - rows)] += bottleneck;
            } else {
                double& f = plan.flow[node * cols + (prev - rows)];
                f -= bottleneck;
                if (f < 1e-18) {
                    f = 0.0;
                }
            }
            node = prev;
        }
        remaining_supply[origin] -= bottleneck;
        remaining_demand[target] -= bottleneck;
        if (remaining_supply[origin] < kMassEps) {
            remaining_supply[origin] = 0.0;
        }
        if (remaining_demand[target] < kMassEps) {
            remaining_demand[target] = 0.0;
        }
        // capping at the target distance keeps reduced costs non-negative
        // even for nodes the search never reached
        const double target_dist = dist[rows + target];
        for (std::size_t k = 0; k < n_nodes; ++k) {
            potential[k] += std::min(dist[k], target_dist);
        }
    }

    plan.cost = 0.0;
    for (std::size_t i = 0; i < rows; ++i) {
        for (std::size_t j = 0; j < cols; ++j) {
            plan.cost += plan.flow[i * cols + j] * cost[i * cols + j];
        }
    }
    return plan;
}

std::vector<double> pairwise_token_cost(const DocumentBag& a, const DocumentBag& b,
                                        const EmbeddingTable& table, ExecPolicy policy) {
    const auto va = resolve_vectors(a, table);
    const auto vb = resolve_vectors(b, table);
    std::vector<double> cost(va.size() * vb.size());
    for_each_index(va.size(), policy, [&](std::size_t i) {
        for (std::size_t j = 0; j < vb.size(); ++j) {
            cost[i * vb.size() + j] = euclidean(va[i], vb[j]);
        }
    });
    return cost;
}

TransportPlan wmd_plan(const DocumentBag& a, const DocumentBag& b, const EmbeddingTable& table) {
    const auto cost = pairwise_token_cost(a, b, table);
    return solve_transport(a.weights, b.weights, cost, a.tokens.size(), b.tokens.size());
}

double wmd(const DocumentBag& a, const DocumentBag& b, const EmbeddingTable& table) {
    return wmd_plan(a, b, table).cost;
}

double rwmd_lower_bound(const DocumentBag& a, const DocumentBag& b, const EmbeddingTable& table) {
    const auto cost = pairwise_token_cost(a, b, table);
    const std::size_t rows = a.tokens.size();
    const std::size_t cols = b.tokens.size();
    double forward = 0.0;
    for (std::size_t i = 0; i < rows; ++i) {
        double nearest = kInf;
        for (std::size_t j = 0; j < cols; ++j) {
            nearest = std::min(nearest, cost[i * cols + j]);
        }
        forward += a.weights[i] * nearest;
    }
    double backward = 0.0;
    for (std::size_t j = 0; j < cols; ++j) {
        double nearest = kInf;
        for (std::size_t i = 0; i < rows; ++i) {
            nearest = std::min(nearest, cost[i * cols + j]);
        }
        backward += b.weights[j] * nearest;
    }
    return std::max(forward, backward);
}

} // namespace xdf::recommend

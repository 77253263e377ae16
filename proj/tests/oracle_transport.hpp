#pragma once

// Brute-force transportation-problem oracle, independent of the production
// solver. Enumerates every spanning subset of rows+cols-1 cells, solves the
// induced flow by leaf elimination and keeps the cheapest feasible one.
// Every vertex of the transport polytope has such a support, so the minimum
// over the enumeration is the exact optimum. Only viable for tiny bags.

#include <cmath>
#include <limits>
#include <optional>
#include <vector>

namespace oracle {

inline std::optional<double> forest_cost(const std::vector<int>& cells, std::size_t rows,
                                         std::size_t cols, const std::vector<double>& supply,
                                         const std::vector<double>& demand,
                                         const std::vector<double>& cost) {
    std::vector<double> row_left = supply;
    std::vector<double> col_left = demand;
    std::vector<int> row_degree(rows, 0);
    std::vector<int> col_degree(cols, 0);
    std::vector<bool> used(cells.size(), false);
    for (int cell : cells) {
        ++row_degree[static_cast<std::size_t>(cell) / cols];
        ++col_degree[static_cast<std::size_t>(cell) % cols];
    }
    for (std::size_t r = 0; r < rows; ++r) {
        if (row_degree[r] == 0) {
            return std::nullopt; // row not covered
        }
    }
    for (std::size_t c = 0; c < cols; ++c) {
        if (col_degree[c] == 0) {
            return std::nullopt;
        }
    }
    double total = 0.0;
    std::size_t remaining = cells.size();
    while (remaining > 0) {
        bool progressed = false;
        for (std::size_t k = 0; k < cells.size(); ++k) {
            if (used[k]) {
                continue;
            }
            const std::size_t r = static_cast<std::size_t>(cells[k]) / cols;
            const std::size_t c = static_cast<std::size_t>(cells[k]) % cols;
            if (row_degree[r] != 1 && col_degree[c] != 1) {
                continue; // not a leaf in the remaining forest
            }
            const double flow = row_degree[r] == 1 ? row_left[r] : col_left[c];
            if (flow < -1e-9) {
                return std::nullopt;
            }
            total += flow * cost[cells[k]];
            row_left[r] -= flow;
            col_left[c] -= flow;
            --row_degree[r];
            --col_degree[c];
            used[k] = true;
            --remaining;
            progressed = true;
        }
        if (!progressed) {
            return std::nullopt; // cycle: not a valid basis
        }
    }
    for (std::size_t r = 0; r < rows; ++r) {
        if (std::abs(row_left[r]) > 1e-9) {
            return std::nullopt; // component masses did not balance
        }
    }
    for (std::size_t c = 0; c < cols; ++c) {
        if (std::abs(col_left[c]) > 1e-9) {
            return std::nullopt;
        }
    }
    return total;
}

/// Exact minimum transport cost by basis enumeration; rows*cols must stay
/// small (<= ~16 cells).
inline double brute_force_transport(const std::vector<double>& supply,
                                    const std::vector<double>& demand,
                                    const std::vector<double>& cost, std::size_t rows,
                                    std::size_t cols) {
    const std::size_t n_cells = rows * cols;
    const std::size_t basis_size = rows + cols - 1;
    double best = std::numeric_limits<double>::infinity();
    std::vector<int> cells(basis_size);
    // enumerate subsets of size basis_size via nested index walking
    std::vector<std::size_t> index(basis_size);
    for (std::size_t i = 0; i < basis_size; ++i) {
        index[i] = i;
    }
    while (true) {
        for (std::size_t i = 0; i < basis_size; ++i) {
            cells[i] = static_cast<int>(index[i]);
        }
        if (auto value = forest_cost(cells, rows, cols, supply, demand, cost)) {
            best = std::min(best, *value);
        }
        // next combination
        bool advanced = false;
        std::size_t i = basis_size;
        while (i-- > 0) {
            if (index[i] + (basis_size - i) < n_cells) {
                ++index[i];
                for (std::size_t j = i + 1; j < basis_size; ++j) {
                    index[j] = index[j - 1] + 1;
                }
                advanced = true;
                break;
            }
        }
        if (!advanced) {
            return best;
        }
    }
}

} // namespace oracle

#pragma once

#include <algorithm>
#include <cstddef>
#include <limits>
#include <optional>
#include <vector>

#include "similarity.hpp"

namespace gapflood {

/// Maximum-weight assignment on a rectangular matrix, padded to square with
/// zero-weight slots. Returns, for each row, the matched column or nullopt
/// when the row landed on a padding slot.
inline std::vector<std::optional<std::size_t>> max_weight_assignment(const SimilarityMatrix& w) {
    const std::size_t rows = w.rows(), cols = w.cols();
    const std::size_t n = std::max(rows, cols);
    std::vector<std::optional<std::size_t>> result(rows);
    if (n == 0) return result;

    double top = 0.0;
    for (std::size_t r = 0; r < rows; ++r)
        for (std::size_t c = 0; c < cols; ++c) top = std::max(top, w.at(r, c));
    // Minimise cost = top - weight; padding cells cost top.
    auto cost = [&](std::size_t r, std::size_t c) {
        return (r < rows && c < cols) ? top - w.at(r, c) : top;
    };

    // Shortest augmenting path formulation, 1-based with a virtual column 0.
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
    std::vector<std::size_t> match_col(n + 1, 0), way(n + 1, 0);
    for (std::size_t i = 1; i <= n; ++i) {
        match_col[0] = i;
        std::size_t j0 = 0;
        std::vector<double> minv(n + 1, inf);
        std::vector<bool> used(n + 1, false);
        do {
            used[j0] = true;
            const std::size_t i0 = match_col[j0];
            double delta = inf;
            std::size_t j1 = 0;
            for (std::size_t j = 1; j <= n; ++j) {
                if (used[j]) continue;
                const double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (std::size_t j = 0; j <= n; ++j) {
                if (used[j]) {
                    u[match_col[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (match_col[j0] != 0);
        do {
            const std::size_t j1 = way[j0];
            match_col[j0] = match_col[j1];
            j0 = j1;
        } while (j0 != 0);
    }
    for (std::size_t j = 1; j <= n; ++j) {
        const std::size_t r = match_col[j] - 1;
        if (r < rows && j - 1 < cols) result[r] = j - 1;
    }
    return result;
}

} // namespace gapflood

#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

#include "fsbench/dataio/dataset.hpp"
#include "fsbench/error.hpp"

namespace fsbench {

/// Row -> column mapping of a minimum-cost assignment. Rows matched only to
/// padding columns map to `unassigned`.
struct Assignment {
    static constexpr std::size_t unassigned = static_cast<std::size_t>(-1);
    std::vector<std::size_t> row_to_col;
    double cost = 0.0;  // over real (non-padding) cells
};

/// Kuhn-Munkres with potentials, O(N^3). Rectangular inputs are padded to
/// square with zero cost.
inline Assignment hungarian(const Matrix& cost) {
    require(cost.rows() > 0 && cost.cols() > 0, "hungarian: empty cost matrix");
    require(cost.allFinite(), "hungarian: cost matrix has non-finite entries");
    const auto rows = static_cast<std::size_t>(cost.rows());
    const auto cols = static_cast<std::size_t>(cost.cols());
    const std::size_t n = std::max(rows, cols);
    auto at = [&](std::size_t i, std::size_t j) {
        return (i < rows && j < cols) ? cost(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) : 0.0;
    };

    constexpr double inf = std::numeric_limits<double>::infinity();
    // 1-based; index 0 is the virtual start column.
    std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
    std::vector<std::size_t> match(n + 1, 0), way(n + 1, 0);
    for (std::size_t i = 1; i <= n; ++i) {
        match[0] = i;
        std::size_t j0 = 0;
        std::vector<double> minv(n + 1, inf);
        std::vector<bool> used(n + 1, false);
        do {
            used[j0] = true;
            const std::size_t i0 = match[j0];
            double delta = inf;
            std::size_t j1 = 0;
            for (std::size_t j = 1; j <= n; ++j) {
                if (used[j]) continue;
                const double reduced = at(i0 - 1, j - 1) - u[i0] - v[j];
                if (reduced < minv[j]) {
                    minv[j] = reduced;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (std::size_t j = 0; j <= n; ++j) {
                if (used[j]) {
                    u[match[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (match[j0] != 0);
        do {
            const std::size_t j1 = way[j0];
            match[j0] = match[j1];
            j0 = j1;
        } while (j0 != 0);
    }

    Assignment result;
    result.row_to_col.assign(rows, Assignment::unassigned);
    for (std::size_t j = 1; j <= n; ++j) {
        const std::size_t i = match[j] - 1;
        if (i < rows && j - 1 < cols) {
            result.row_to_col[i] = j - 1;
            result.cost += at(i, j - 1);
        }
    }
    return result;
}

}  // namespace fsbench

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "fsbench/dataio/dataset.hpp"
#include "fsbench/error.hpp"
#include "fsbench/random.hpp"

namespace fsbench {

/// Scores (higher = more important) and the induced feature order: descending
/// score, ties by ascending feature index.
struct FeatureRanking {
    std::vector<double> scores;
    std::vector<std::size_t> order;
    std::string method;
    std::optional<std::uint64_t> seed;

    std::size_t size() const { return scores.size(); }
};

inline FeatureRanking make_ranking(std::vector<double> scores, std::string method,
                                   std::optional<std::uint64_t> seed = std::nullopt) {
    require(!scores.empty(), method + ": ranking needs at least one feature");
    for (double s : scores) require(!std::isnan(s), method + ": NaN feature score");
    std::vector<std::size_t> order(scores.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&scores](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
    return FeatureRanking{std::move(scores), std::move(order), std::move(method), seed};
}

/// The first k entries of the order.
inline std::vector<std::size_t> top_k(const FeatureRanking& ranking, std::size_t k) {
    if (k < 1 || k > ranking.order.size()) {
        throw InvalidArgument("top_k: k=" + std::to_string(k) + " outside [1, " +
                              std::to_string(ranking.order.size()) + "]");
    }
    return {ranking.order.begin(), ranking.order.begin() + static_cast<std::ptrdiff_t>(k)};
}

/// Scores are i.i.d. uniform on [0, 1).
inline FeatureRanking random_ranking(std::size_t d, std::uint64_t seed) {
    require(d >= 1, "random_ranking: d must be at least 1");
    Rng rng(seed);
    std::vector<double> scores(d);
    for (auto& s : scores) s = rng.uniform();
    return make_ranking(std::move(scores), "random", seed);
}

/// Population variance of each feature.
inline FeatureRanking variance_ranking(const Dataset& ds) {
    const Vector var = population_variance(ds.X);
    return make_ranking(std::vector<double>(var.data(), var.data() + var.size()), "variance");
}

/// Least-redundant first: score_j = 1 - mean_{i != j} |corr(f_j, f_i)|.
/// Pairs involving a zero-variance feature count as correlation 0.
inline FeatureRanking correlation_ranking(const Dataset& ds) {
    const Eigen::Index n = ds.X.rows();
    const Eigen::Index d = ds.X.cols();
    require(d >= 2, "correlation_ranking: needs at least 2 features");

    // Unit-norm centred columns; constant columns stay zero.
    Matrix Z(n, d);
    for (Eigen::Index j = 0; j < d; ++j) {
        if (column_is_constant(ds.X, j)) {
            Z.col(j).setZero();
            continue;
        }
        Z.col(j) = ds.X.col(j).array() - ds.X.col(j).mean();
        const double norm = Z.col(j).norm();
        if (norm > 0.0) {
            Z.col(j) /= norm;
        } else {
            Z.col(j).setZero();
        }
    }

    // Blocked Gram so d x d never materialises for very wide data.
    constexpr Eigen::Index block = 256;
    std::vector<double> scores(static_cast<std::size_t>(d));
    Matrix gram;
    for (Eigen::Index start = 0; start < d; start += block) {
        const Eigen::Index width = std::min(block, d - start);
        gram.noalias() = Z.middleCols(start, width).transpose() * Z;
        for (Eigen::Index b = 0; b < width; ++b) {
            const Eigen::Index j = start + b;
            double total = 0.0;
            for (Eigen::Index i = 0; i < d; ++i) {
                if (i == j) continue;
                total += std::min(1.0, std::abs(gram(b, i)));
            }
            scores[static_cast<std::size_t>(j)] = 1.0 - total / static_cast<double>(d - 1);
        }
    }
    return make_ranking(std::move(scores), "correlation");
}

}  // namespace fsbench

#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <vector>

#include <Eigen/Sparse>

#include "fsbench/dataio/dataset.hpp"
#include "fsbench/error.hpp"
#include "fsbench/selectors/ranking.hpp"

namespace fsbench {

enum class BandwidthMode { median_heuristic, fixed };

struct GraphParams {
    std::size_t k_neighbors = 5;
    BandwidthMode bandwidth_mode = BandwidthMode::median_heuristic;
    std::optional<double> fixed_bandwidth;
};

using SparseMatrix = Eigen::SparseMatrix<double>;

/// Symmetric heat-kernel similarity graph; zero diagonal.
struct SimilarityGraph {
    SparseMatrix weights;
    double bandwidth = 1.0;

    Vector degrees() const {
        Vector deg = Vector::Zero(weights.rows());
        for (Eigen::Index c = 0; c < weights.outerSize(); ++c) {
            for (SparseMatrix::InnerIterator it(weights, c); it; ++it) deg(it.row()) += it.value();
        }
        return deg;
    }
};

/// Symmetrised kNN graph: i ~ j when either lists the other among its k
/// nearest (ties by lower index). Weights exp(-|xi - xj|^2 / t), where t is
/// the median squared distance over edges unless fixed.
inline SimilarityGraph build_knn_graph(const Matrix& X, const GraphParams& params) {
    const Eigen::Index n = X.rows();
    const auto k = static_cast<Eigen::Index>(params.k_neighbors);
    require(k >= 1, "graph: k_neighbors must be at least 1");
    require(k < n, "graph: k_neighbors (" + std::to_string(k) + ") must be smaller than the instance count (" +
                       std::to_string(n) + ")");
    if (params.bandwidth_mode == BandwidthMode::fixed) {
        require(params.fixed_bandwidth && *params.fixed_bandwidth > 0.0, "graph: fixed bandwidth must be positive");
    }

    const Vector sq_norms = X.rowwise().squaredNorm();
    std::vector<std::vector<Eigen::Index>> neighbours(static_cast<std::size_t>(n));
    constexpr Eigen::Index block = 256;
    Matrix dist;
    std::vector<Eigen::Index> candidates(static_cast<std::size_t>(n));
    for (Eigen::Index start = 0; start < n; start += block) {
        const Eigen::Index rows = std::min(block, n - start);
        dist.noalias() = -2.0 * X.middleRows(start, rows) * X.transpose();
        for (Eigen::Index b = 0; b < rows; ++b) {
            const Eigen::Index i = start + b;
            auto row = dist.row(b);
            row.array() += sq_norms.transpose().array() + sq_norms(i);
            std::iota(candidates.begin(), candidates.end(), Eigen::Index{0});
            std::swap(candidates[static_cast<std::size_t>(i)], candidates.back());
            auto first = candidates.begin();
            auto last = candidates.end() - 1;  // self excluded
            std::partial_sort(first, first + k, last, [&row](Eigen::Index a, Eigen::Index c) {
                return row(a) < row(c) || (row(a) == row(c) && a < c);
            });
            neighbours[static_cast<std::size_t>(i)].assign(first, first + k);
        }
    }

    // Undirected edge set, each edge once as (min, max).
    std::vector<std::pair<Eigen::Index, Eigen::Index>> edges;
    edges.reserve(static_cast<std::size_t>(n * k));
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j : neighbours[static_cast<std::size_t>(i)]) edges.emplace_back(std::min(i, j), std::max(i, j));
    }
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());

    std::vector<double> sq(edges.size());
    for (std::size_t e = 0; e < edges.size(); ++e) {
        sq[e] = (X.row(edges[e].first) - X.row(edges[e].second)).squaredNorm();
    }

    SimilarityGraph graph;
    if (params.bandwidth_mode == BandwidthMode::fixed) {
        graph.bandwidth = *params.fixed_bandwidth;
    } else {
        std::vector<double> sorted = sq;
        std::sort(sorted.begin(), sorted.end());
        const std::size_t m = sorted.size();
        const double median = m % 2 == 1 ? sorted[m / 2] : 0.5 * (sorted[m / 2 - 1] + sorted[m / 2]);
        graph.bandwidth = median > 0.0 ? median : 1.0;
    }

    std::vector<Eigen::Triplet<double>> triplets;
    triplets.reserve(2 * edges.size());
    for (std::size_t e = 0; e < edges.size(); ++e) {
        const double w = std::exp(-sq[e] / graph.bandwidth);
        triplets.emplace_back(edges[e].first, edges[e].second, w);
        triplets.emplace_back(edges[e].second, edges[e].first, w);
    }
    graph.weights.resize(n, n);
    graph.weights.setFromTriplets(triplets.begin(), triplets.end());
    return graph;
}

/// Per-feature Laplacian Score over a fixed graph (lower = better).
/// Constant features, and features with zero degree-weighted spread, get +inf.
inline Vector laplacian_scores(const Matrix& X, const SimilarityGraph& graph) {
    require(graph.weights.rows() == X.rows() && graph.weights.cols() == X.rows(),
            "laplacian_scores: graph size does not match instance count");
    const Vector deg = graph.degrees();
    const double total_degree = deg.sum();
    require(total_degree > 0.0, "laplacian_scores: graph has no edge weight");

    Vector out(X.cols());
    for (Eigen::Index j = 0; j < X.cols(); ++j) {
        if (column_is_constant(X, j)) {
            out(j) = std::numeric_limits<double>::infinity();
            continue;
        }
        const auto f = X.col(j);
        const double centre = f.dot(deg) / total_degree;
        const double spread = ((f.array() - centre).square() * deg.array()).sum();
        // f~' L f~ = 1/2 sum_ij S_ij (f_i - f_j)^2, shift-free
        double smoothness = 0.0;
        for (Eigen::Index c = 0; c < graph.weights.outerSize(); ++c) {
            for (SparseMatrix::InnerIterator it(graph.weights, c); it; ++it) {
                const double diff = f(it.row()) - f(it.col());
                smoothness += it.value() * diff * diff;
            }
        }
        smoothness *= 0.5;
        out(j) = spread > 0.0 ? smoothness / spread : std::numeric_limits<double>::infinity();
    }
    return out;
}

inline FeatureRanking laplacian_score_ranking(const Dataset& ds, const GraphParams& params = {}) {
    const SimilarityGraph graph = build_knn_graph(ds.X, params);
    const Vector ls = laplacian_scores(ds.X, graph);
    std::vector<double> scores(static_cast<std::size_t>(ls.size()));
    for (Eigen::Index j = 0; j < ls.size(); ++j) scores[static_cast<std::size_t>(j)] = -ls(j);
    return make_ranking(std::move(scores), "laplacian");
}

}  // namespace fsbench

#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include <Eigen/Eigenvalues>

#include "fsbench/dataio/dataset.hpp"
#include "fsbench/error.hpp"
#include "fsbench/selectors/laplacian.hpp"
#include "fsbench/selectors/ranking.hpp"

namespace fsbench {

struct LassoOptions {
    double tolerance = 1e-6;  // on the largest absolute coefficient change in a sweep
    std::size_t max_sweeps = 10000;
    bool record_objective = false;
};

struct LassoResult {
    Vector coefficients;
    std::size_t sweeps = 0;
    bool converged = false;
    std::vector<double> objective;  // after each sweep, when recorded
};

inline double lasso_objective(const Matrix& X, const Vector& y, const Vector& a, double penalty) {
    return (y - X * a).squaredNorm() + penalty * a.lpNorm<1>();
}

inline double soft_threshold(double value, double threshold) {
    if (value > threshold) return value - threshold;
    if (value < -threshold) return value + threshold;
    return 0.0;
}

/// Cyclic coordinate descent for  min_a |y - X a|^2 + penalty * |a|_1.
/// Each coordinate update is exact, so the objective never increases.
inline LassoResult lasso_coordinate_descent(const Matrix& X, const Vector& y, double penalty,
                                            const LassoOptions& options = {}) {
    require(X.rows() == y.size(), "lasso: design rows must match response length");
    require(penalty >= 0.0, "lasso: penalty must be non-negative");
    const Eigen::Index d = X.cols();
    const Vector col_sq = X.colwise().squaredNorm().transpose();
    LassoResult result;
    result.coefficients = Vector::Zero(d);
    Vector residual = y;
    const double half = 0.5 * penalty;

    for (result.sweeps = 1; result.sweeps <= options.max_sweeps; ++result.sweeps) {
        double max_change = 0.0;
        for (Eigen::Index j = 0; j < d; ++j) {
            if (col_sq(j) == 0.0) continue;
            const double old = result.coefficients(j);
            const double rho = X.col(j).dot(residual) + col_sq(j) * old;
            const double updated = soft_threshold(rho, half) / col_sq(j);
            if (updated != old) {
                residual.noalias() -= (updated - old) * X.col(j);
                result.coefficients(j) = updated;
                max_change = std::max(max_change, std::abs(updated - old));
            }
        }
        if (options.record_objective) {
            result.objective.push_back(residual.squaredNorm() + penalty * result.coefficients.lpNorm<1>());
        }
        if (max_change < options.tolerance) {
            result.converged = true;
            break;
        }
    }
    result.sweeps = std::min(result.sweeps, options.max_sweeps);
    return result;
}

/// The `count` smallest non-trivial solutions of L y = lambda D y, as columns
/// normalised so that y' D y = 1.
inline Matrix spectral_embedding(const SimilarityGraph& graph, std::size_t count) {
    const Eigen::Index n = graph.weights.rows();
    require(count >= 1 && static_cast<Eigen::Index>(count) <= n - 1,
            "spectral embedding: eigenvector count must be in [1, n-1]");
    const Vector deg = graph.degrees();
    for (Eigen::Index i = 0; i < n; ++i) {
        if (!(deg(i) > 0.0)) {
            throw InvalidArgument("MCFS: vertex " + std::to_string(i) +
                                  " is isolated in the similarity graph; increase k_neighbors");
        }
    }
    const Vector inv_sqrt = deg.array().rsqrt();
    // I - D^-1/2 S D^-1/2
    Matrix normalized = -(inv_sqrt.asDiagonal() * Matrix(graph.weights) * inv_sqrt.asDiagonal());
    normalized.diagonal().array() += 1.0;
    Eigen::SelfAdjointEigenSolver<Matrix> solver(normalized);
    if (solver.info() != Eigen::Success) throw Error("MCFS: eigen-decomposition failed");
    // Eigenvalues ascend; column 0 is the trivial D^1/2 1 direction.
    Matrix embedding = inv_sqrt.asDiagonal() * solver.eigenvectors().middleCols(1, static_cast<Eigen::Index>(count));
    return embedding;
}

struct McfsParams {
    GraphParams graph;
    std::size_t n_eigen = 5;
    double l1_ratio = 0.01;  // penalty_k = l1_ratio * |X' y_k|_inf
    LassoOptions lasso;
};

/// score_j = max_k |a_kj| over the sparse regressions of each eigenvector.
inline FeatureRanking mcfs_ranking(const Dataset& ds, const McfsParams& params = {}) {
    const Eigen::Index n = ds.X.rows();
    require(n >= 3, "MCFS: needs at least 3 instances");
    require(params.n_eigen >= 1 && static_cast<Eigen::Index>(params.n_eigen) <= n - 1,
            "MCFS: n_eigen must be in [1, n-1]");
    require(params.l1_ratio > 0.0, "MCFS: l1 penalty must be positive");

    const SimilarityGraph graph = build_knn_graph(ds.X, params.graph);
    const Matrix embedding = spectral_embedding(graph, params.n_eigen);

    std::vector<double> scores(ds.feature_count(), 0.0);
    for (Eigen::Index k = 0; k < embedding.cols(); ++k) {
        const Vector target = embedding.col(k);
        const double penalty = params.l1_ratio * (ds.X.transpose() * target).lpNorm<Eigen::Infinity>();
        const LassoResult fit = lasso_coordinate_descent(ds.X, target, penalty, params.lasso);
        for (Eigen::Index j = 0; j < fit.coefficients.size(); ++j) {
            auto& s = scores[static_cast<std::size_t>(j)];
            s = std::max(s, std::abs(fit.coefficients(j)));
        }
    }
    return make_ranking(std::move(scores), "mcfs");
}

}  // namespace fsbench

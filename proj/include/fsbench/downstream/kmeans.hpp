#pragma once

#include <cstdint>
#include <limits>
#include <vector>

#include "fsbench/dataio/dataset.hpp"
#include "fsbench/error.hpp"
#include "fsbench/random.hpp"

namespace fsbench {

struct KMeansOptions {
    std::size_t max_iterations = 300;
};

struct KMeansResult {
    Labels assignment;
    Matrix centroids;  // k x d
    double inertia = 0.0;
    std::vector<double> inertia_history;  // after every centroid update
    std::size_t iterations = 0;
};

namespace detail {

inline double squared_distance(const Matrix& X, Eigen::Index row, const Matrix& C, Eigen::Index c) {
    return (X.row(row) - C.row(c)).squaredNorm();
}

/// Nearest centroid per row, ties to the lower centroid index.
inline void assign_nearest(const Matrix& X, const Matrix& C, Labels& out, std::vector<double>& dist) {
    for (Eigen::Index i = 0; i < X.rows(); ++i) {
        double best = std::numeric_limits<double>::infinity();
        int arg = 0;
        for (Eigen::Index c = 0; c < C.rows(); ++c) {
            const double dd = squared_distance(X, i, C, c);
            if (dd < best) {
                best = dd;
                arg = static_cast<int>(c);
            }
        }
        out[static_cast<std::size_t>(i)] = arg;
        dist[static_cast<std::size_t>(i)] = best;
    }
}

/// Empty clusters take the point farthest from its centroid, drawn from a
/// cluster that keeps at least one member.
inline void repair_empty(const Matrix& X, Matrix& C, Labels& assignment, std::vector<double>& dist) {
    const auto k = static_cast<std::size_t>(C.rows());
    std::vector<std::size_t> sizes(k, 0);
    for (int a : assignment) ++sizes[static_cast<std::size_t>(a)];
    for (std::size_t c = 0; c < k; ++c) {
        if (sizes[c] != 0) continue;
        std::size_t far = assignment.size();
        double far_dist = -1.0;
        for (std::size_t i = 0; i < assignment.size(); ++i) {
            if (sizes[static_cast<std::size_t>(assignment[i])] > 1 && dist[i] > far_dist) {
                far_dist = dist[i];
                far = i;
            }
        }
        if (far == assignment.size()) break;
        --sizes[static_cast<std::size_t>(assignment[far])];
        assignment[far] = static_cast<int>(c);
        sizes[c] = 1;
        dist[far] = 0.0;
        C.row(static_cast<Eigen::Index>(c)) = X.row(static_cast<Eigen::Index>(far));
    }
}

inline void update_centroids(const Matrix& X, const Labels& assignment, Matrix& C) {
    Matrix sums = Matrix::Zero(C.rows(), C.cols());
    std::vector<double> counts(static_cast<std::size_t>(C.rows()), 0.0);
    for (Eigen::Index i = 0; i < X.rows(); ++i) {
        const int a = assignment[static_cast<std::size_t>(i)];
        sums.row(a) += X.row(i);
        counts[static_cast<std::size_t>(a)] += 1.0;
    }
    for (Eigen::Index c = 0; c < C.rows(); ++c) {
        if (counts[static_cast<std::size_t>(c)] > 0.0) C.row(c) = sums.row(c) / counts[static_cast<std::size_t>(c)];
    }
}

inline double inertia_of(const Matrix& X, const Labels& assignment, const Matrix& C) {
    double total = 0.0;
    for (Eigen::Index i = 0; i < X.rows(); ++i) total += squared_distance(X, i, C, assignment[static_cast<std::size_t>(i)]);
    return total;
}

}  // namespace detail

/// k-means++ seeding followed by Lloyd iterations until the assignment is a
/// fixpoint (or the iteration limit).
inline KMeansResult kmeans(const Matrix& X, std::size_t k, std::uint64_t seed, const KMeansOptions& options = {}) {
    const Eigen::Index n = X.rows();
    require(k >= 1, "kmeans: k must be at least 1");
    require(static_cast<Eigen::Index>(k) <= n, "kmeans: k (" + std::to_string(k) + ") exceeds instance count (" +
                                                   std::to_string(n) + ")");
    Rng rng(seed);
    KMeansResult result;
    result.centroids.resize(static_cast<Eigen::Index>(k), X.cols());

    // k-means++ seeding.
    std::vector<double> closest(static_cast<std::size_t>(n), std::numeric_limits<double>::infinity());
    Eigen::Index pick = static_cast<Eigen::Index>(rng.index(static_cast<std::uint64_t>(n)));
    for (std::size_t c = 0; c < k; ++c) {
        if (c > 0) {
            double total = 0.0;
            for (double v : closest) total += v;
            if (total > 0.0) {
                const double target = rng.uniform() * total;
                double acc = 0.0;
                pick = n - 1;
                for (Eigen::Index i = 0; i < n; ++i) {
                    acc += closest[static_cast<std::size_t>(i)];
                    if (acc > target && closest[static_cast<std::size_t>(i)] > 0.0) {
                        pick = i;
                        break;
                    }
                }
            } else {
                pick = static_cast<Eigen::Index>(rng.index(static_cast<std::uint64_t>(n)));
            }
        }
        result.centroids.row(static_cast<Eigen::Index>(c)) = X.row(pick);
        for (Eigen::Index i = 0; i < n; ++i) {
            const double dd = detail::squared_distance(X, i, result.centroids, static_cast<Eigen::Index>(c));
            auto& slot = closest[static_cast<std::size_t>(i)];
            if (dd < slot) slot = dd;
        }
    }

    Labels assignment(static_cast<std::size_t>(n), -1);
    Labels next(static_cast<std::size_t>(n));
    std::vector<double> dist(static_cast<std::size_t>(n));
    for (result.iterations = 0; result.iterations < options.max_iterations;) {
        detail::assign_nearest(X, result.centroids, next, dist);
        detail::repair_empty(X, result.centroids, next, dist);
        if (next == assignment) break;
        assignment = next;
        ++result.iterations;
        detail::update_centroids(X, assignment, result.centroids);
        result.inertia_history.push_back(detail::inertia_of(X, assignment, result.centroids));
    }
    result.assignment = std::move(assignment);
    result.inertia = detail::inertia_of(X, result.assignment, result.centroids);
    return result;
}

}  // namespace fsbench

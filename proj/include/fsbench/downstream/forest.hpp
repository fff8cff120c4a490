#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <span>
#include <vector>

#include "fsbench/dataio/dataset.hpp"
#include "fsbench/error.hpp"
#include "fsbench/random.hpp"

namespace fsbench {

struct ForestParams {
    std::size_t trees = 100;
    bool bootstrap = true;                   // n-of-n sampling with replacement
    std::size_t min_leaf = 1;
    std::optional<std::size_t> max_features;  // default ceil(sqrt(d))
};

/// CART classification tree, Gini impurity, grown until pure.
class DecisionTree {
public:
    /// `rows` may contain repeats (bootstrap sample).
    void fit(const Matrix& X, std::span<const int> y, std::vector<std::size_t> rows, std::size_t n_classes,
             std::size_t max_features, std::size_t min_leaf, Rng& rng) {
        nodes_.clear();
        const auto d = static_cast<std::size_t>(X.cols());
        std::vector<std::size_t> features(d);
        std::iota(features.begin(), features.end(), std::size_t{0});

        struct Pending {
            std::size_t node;
            std::vector<std::size_t> rows;
        };
        std::vector<Pending> stack;
        nodes_.push_back(Node{});
        stack.push_back({0, std::move(rows)});

        std::vector<std::size_t> order;
        std::vector<double> left_counts(n_classes), right_counts(n_classes);
        while (!stack.empty()) {
            Pending job = std::move(stack.back());
            stack.pop_back();
            const auto& members = job.rows;

            std::vector<double> counts(n_classes, 0.0);
            for (std::size_t r : members) counts[static_cast<std::size_t>(y[r])] += 1.0;
            const int majority = static_cast<int>(std::max_element(counts.begin(), counts.end()) - counts.begin());
            nodes_[job.node].label = majority;
            const bool pure = counts[static_cast<std::size_t>(majority)] == static_cast<double>(members.size());
            if (pure || members.size() < 2 * min_leaf) continue;

            // Random feature order; the first max_features are the candidates,
            // later ones are only tried when no candidate can split.
            rng.shuffle(std::span<std::size_t>(features));
            const double parent_sq = std::inner_product(counts.begin(), counts.end(), counts.begin(), 0.0);
            const double m = static_cast<double>(members.size());
            double best_gain = -1.0;
            std::size_t best_feature = 0;
            double best_threshold = 0.0;
            bool found = false;
            for (std::size_t fi = 0; fi < d; ++fi) {
                if (fi >= max_features && found) break;
                const auto f = static_cast<Eigen::Index>(features[fi]);
                order = members;
                std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
                    return X(static_cast<Eigen::Index>(a), f) < X(static_cast<Eigen::Index>(b), f);
                });
                std::fill(left_counts.begin(), left_counts.end(), 0.0);
                right_counts = counts;
                double left_sq = 0.0, right_sq = parent_sq;
                for (std::size_t i = 0; i + 1 < order.size(); ++i) {
                    const auto k = static_cast<std::size_t>(y[order[i]]);
                    left_sq += 2.0 * left_counts[k] + 1.0;
                    right_sq -= 2.0 * right_counts[k] - 1.0;
                    left_counts[k] += 1.0;
                    right_counts[k] -= 1.0;
                    const double lo = X(static_cast<Eigen::Index>(order[i]), f);
                    const double hi = X(static_cast<Eigen::Index>(order[i + 1]), f);
                    if (!(lo < hi)) continue;
                    const double n_left = static_cast<double>(i + 1);
                    const double n_right = m - n_left;
                    if (n_left < static_cast<double>(min_leaf) || n_right < static_cast<double>(min_leaf)) continue;
                    // Weighted Gini decrease up to constants: larger is better.
                    const double gain = left_sq / n_left + right_sq / n_right;
                    if (gain > best_gain) {
                        best_gain = gain;
                        best_feature = features[fi];
                        double mid = lo + 0.5 * (hi - lo);
                        if (!(mid < hi)) mid = lo;
                        best_threshold = mid;
                        found = true;
                    }
                }
            }
            if (!found) continue;

            std::vector<std::size_t> left, right;
            for (std::size_t r : members) {
                if (X(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(best_feature)) <= best_threshold) {
                    left.push_back(r);
                } else {
                    right.push_back(r);
                }
            }
            nodes_[job.node].feature = static_cast<int>(best_feature);
            nodes_[job.node].threshold = best_threshold;
            nodes_[job.node].left = nodes_.size();
            nodes_.push_back(Node{});
            nodes_[job.node].right = nodes_.size();
            nodes_.push_back(Node{});
            stack.push_back({nodes_[job.node].right, std::move(right)});
            stack.push_back({nodes_[job.node].left, std::move(left)});
        }
    }

    int predict(const Matrix& X, Eigen::Index row) const {
        std::size_t at = 0;
        while (nodes_[at].feature >= 0) {
            at = X(row, nodes_[at].feature) <= nodes_[at].threshold ? nodes_[at].left : nodes_[at].right;
        }
        return nodes_[at].label;
    }

    std::size_t node_count() const { return nodes_.size(); }

private:
    struct Node {
        int feature = -1;
        double threshold = 0.0;
        std::size_t left = 0, right = 0;
        int label = 0;
    };
    std::vector<Node> nodes_;
};

struct ForestPrediction {
    Labels predicted;
    Matrix scores;  // rows = test instances, columns = classes; each row sums to 1
};

/// Trains a forest on (X_train, y_train) and scores X_test. Per-class score is
/// the fraction of trees voting for that class; ties go to the lowest class.
inline ForestPrediction rf_train_predict(const Matrix& X_train, std::span<const int> y_train, const Matrix& X_test,
                                         const ForestParams& params, std::uint64_t seed,
                                         std::optional<std::size_t> n_classes = std::nullopt) {
    require(static_cast<std::size_t>(X_train.rows()) == y_train.size(), "random forest: label count mismatch");
    require(X_train.cols() >= 1, "random forest: needs at least one feature");
    require(X_train.cols() == X_test.cols(), "random forest: train/test feature count mismatch");
    require(params.trees >= 1, "random forest: needs at least one tree");
    require(params.min_leaf >= 1, "random forest: min_leaf must be at least 1");
    require(!y_train.empty(), "random forest: empty training set");
    const int top = *std::max_element(y_train.begin(), y_train.end());
    require(*std::min_element(y_train.begin(), y_train.end()) >= 0, "random forest: negative label");
    const bool multi = std::any_of(y_train.begin(), y_train.end(), [&](int v) { return v != y_train[0]; });
    require(multi, "random forest: training data has a single class");
    const std::size_t classes = std::max(n_classes.value_or(0), static_cast<std::size_t>(top) + 1);

    const auto d = static_cast<std::size_t>(X_train.cols());
    const std::size_t mtry = std::clamp<std::size_t>(
        params.max_features.value_or(static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(d))))), 1, d);
    const std::size_t n = y_train.size();

    Matrix votes = Matrix::Zero(X_test.rows(), static_cast<Eigen::Index>(classes));
    DecisionTree tree;
    std::vector<std::size_t> rows(n);
    for (std::size_t t = 0; t < params.trees; ++t) {
        Rng rng(derive_seed(seed, "tree", t));
        if (params.bootstrap) {
            for (auto& r : rows) r = rng.index(n);
        } else {
            std::iota(rows.begin(), rows.end(), std::size_t{0});
        }
        tree.fit(X_train, y_train, rows, classes, mtry, params.min_leaf, rng);
        for (Eigen::Index i = 0; i < X_test.rows(); ++i) votes(i, tree.predict(X_test, i)) += 1.0;
    }

    ForestPrediction out;
    out.scores = votes / static_cast<double>(params.trees);
    out.predicted.resize(static_cast<std::size_t>(X_test.rows()));
    for (Eigen::Index i = 0; i < X_test.rows(); ++i) {
        Eigen::Index best = 0;
        for (Eigen::Index c = 1; c < votes.cols(); ++c) {
            if (votes(i, c) > votes(i, best)) best = c;
        }
        out.predicted[static_cast<std::size_t>(i)] = static_cast<int>(best);
    }
    return out;
}

}  // namespace fsbench

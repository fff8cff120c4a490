#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <numeric>
#include <span>
#include <vector>

#include "fsbench/dataio/dataset.hpp"
#include "fsbench/downstream/hungarian.hpp"
#include "fsbench/error.hpp"

namespace fsbench {

struct ConfusionCounts {
    std::size_t tp = 0, tn = 0, fp = 0, fn = 0;
    std::size_t total() const { return tp + tn + fp + fn; }
};

/// One-vs-rest counts for class `positive`.
inline ConfusionCounts confusion(std::span<const int> predicted, std::span<const int> truth, int positive) {
    require(predicted.size() == truth.size(), "confusion: length mismatch");
    ConfusionCounts c;
    for (std::size_t i = 0; i < truth.size(); ++i) {
        const bool p = predicted[i] == positive;
        const bool t = truth[i] == positive;
        if (p && t) ++c.tp;
        else if (!p && !t) ++c.tn;
        else if (p) ++c.fp;
        else ++c.fn;
    }
    return c;
}

inline double accuracy(std::span<const int> predicted, std::span<const int> truth) {
    require(predicted.size() == truth.size(), "accuracy: length mismatch (" + std::to_string(predicted.size()) +
                                                  " vs " + std::to_string(truth.size()) + ")");
    require(!truth.empty(), "accuracy: no predictions");
    std::size_t hits = 0;
    for (std::size_t i = 0; i < truth.size(); ++i) hits += predicted[i] == truth[i];
    return static_cast<double>(hits) / static_cast<double>(truth.size());
}

/// Average 1-based ranks; tied values share the mean of their positions.
inline std::vector<double> average_ranks(std::span<const double> values) {
    std::vector<std::size_t> idx(values.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    std::vector<double> ranks(values.size());
    for (std::size_t i = 0; i < idx.size();) {
        std::size_t j = i;
        while (j + 1 < idx.size() && values[idx[j + 1]] == values[idx[i]]) ++j;
        const double r = 0.5 * static_cast<double>(i + j) + 1.0;
        for (std::size_t t = i; t <= j; ++t) ranks[idx[t]] = r;
        i = j + 1;
    }
    return ranks;
}

/// Mann-Whitney form of the ROC area; ties count one half.
inline double binary_auc(std::span<const double> scores, std::span<const bool> positive) {
    require(scores.size() == positive.size(), "auc: length mismatch");
    const auto ranks = average_ranks(scores);
    double pos = 0.0, neg = 0.0, rank_sum = 0.0;
    for (std::size_t i = 0; i < scores.size(); ++i) {
        if (positive[i]) {
            pos += 1.0;
            rank_sum += ranks[i];
        } else {
            neg += 1.0;
        }
    }
    require(pos > 0.0 && neg > 0.0, "auc: needs both positive and negative instances");
    return (rank_sum - pos * (pos + 1.0) / 2.0) / (pos * neg);
}

/// Binary: column 1 scores class 1. Multiclass: unweighted mean of
/// one-vs-rest AUCs over classes with both positives and negatives.
inline double auc(const Matrix& scores, std::span<const int> truth) {
    require(static_cast<std::size_t>(scores.rows()) == truth.size(), "auc: score rows must match labels");
    require(!truth.empty(), "auc: no instances");
    const int top = *std::max_element(truth.begin(), truth.end());
    require(top >= 0 && top < scores.cols(), "auc: label outside score columns");
    std::vector<bool> present(static_cast<std::size_t>(scores.cols()), false);
    for (int t : truth) present[static_cast<std::size_t>(t)] = true;
    require(std::count(present.begin(), present.end(), true) >= 2, "auc: needs at least 2 classes present");

    std::vector<double> column(truth.size());
    std::unique_ptr<bool[]> positive(new bool[truth.size()]);
    auto one_vs_rest = [&](Eigen::Index c) {
        for (std::size_t i = 0; i < truth.size(); ++i) {
            column[i] = scores(static_cast<Eigen::Index>(i), c);
            positive[i] = truth[i] == c;
        }
        return binary_auc(column, std::span<const bool>(positive.get(), truth.size()));
    };

    if (scores.cols() == 2) return one_vs_rest(1);
    double total = 0.0;
    std::size_t used = 0;
    for (Eigen::Index c = 0; c < scores.cols(); ++c) {
        const auto members = std::count(truth.begin(), truth.end(), static_cast<int>(c));
        if (members == 0 || static_cast<std::size_t>(members) == truth.size()) continue;
        total += one_vs_rest(c);
        ++used;
    }
    require(used > 0, "auc: every one-vs-rest split was degenerate");
    return total / static_cast<double>(used);
}

/// Counts table with rows = distinct values of `a` (ascending), columns =
/// distinct values of `b`.
inline Matrix contingency(std::span<const int> a, std::span<const int> b) {
    require(a.size() == b.size(), "contingency: length mismatch (" + std::to_string(a.size()) + " vs " +
                                      std::to_string(b.size()) + ")");
    std::map<int, Eigen::Index> ra, rb;
    for (int v : a) ra.emplace(v, 0);
    for (int v : b) rb.emplace(v, 0);
    Eigen::Index next = 0;
    for (auto& [v, id] : ra) id = next++;
    next = 0;
    for (auto& [v, id] : rb) id = next++;
    Matrix table = Matrix::Zero(static_cast<Eigen::Index>(ra.size()), static_cast<Eigen::Index>(rb.size()));
    for (std::size_t i = 0; i < a.size(); ++i) table(ra.at(a[i]), rb.at(b[i])) += 1.0;
    return table;
}

/// Fraction of instances matched under the best one-to-one cluster -> label
/// mapping.
inline double clustering_accuracy(std::span<const int> clusters, std::span<const int> truth) {
    require(!truth.empty(), "clustering_accuracy: no instances");
    const Matrix table = contingency(clusters, truth);
    const Assignment best = hungarian(-table);
    return -best.cost / static_cast<double>(truth.size());
}

/// NMI with the geometric-mean normaliser. When either entropy is zero the
/// value is 1 for identical partitions and 0 otherwise.
inline double nmi(std::span<const int> clusters, std::span<const int> truth) {
    require(!truth.empty(), "nmi: no instances");
    const Matrix table = contingency(clusters, truth);
    const bool identical = table.rows() == table.cols() &&
                           ((table.array() > 0.0).rowwise().count() == 1).all() &&
                           ((table.array() > 0.0).colwise().count() == 1).all();
    if (identical) return 1.0;

    const double total = static_cast<double>(truth.size());
    const Vector row_sum = table.rowwise().sum();
    const Vector col_sum = table.colwise().sum().transpose();
    auto entropy = [total](const Vector& counts) {
        double h = 0.0;
        for (Eigen::Index i = 0; i < counts.size(); ++i) {
            if (counts(i) > 0.0) {
                const double p = counts(i) / total;
                h -= p * std::log(p);
            }
        }
        return h;
    };
    const double h_clusters = entropy(row_sum);
    const double h_truth = entropy(col_sum);
    if (h_clusters <= 0.0 || h_truth <= 0.0) return 0.0;

    double mi = 0.0;
    for (Eigen::Index i = 0; i < table.rows(); ++i) {
        for (Eigen::Index j = 0; j < table.cols(); ++j) {
            const double nij = table(i, j);
            if (nij > 0.0) mi += nij / total * std::log(total * nij / (row_sum(i) * col_sum(j)));
        }
    }
    return std::clamp(mi / std::sqrt(h_clusters * h_truth), 0.0, 1.0);
}

}  // namespace fsbench

#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "fsbench/dataio/dataset.hpp"
#include "fsbench/downstream/folds.hpp"
#include "fsbench/downstream/forest.hpp"
#include "fsbench/downstream/kmeans.hpp"
#include "fsbench/downstream/metrics.hpp"
#include "fsbench/error.hpp"
#include "fsbench/random.hpp"

namespace fsbench {

struct SupervisedParams {
    int folds = 5;
    ForestParams forest;
};

struct UnsupervisedParams {
    std::size_t runs = 10;
    KMeansOptions kmeans;
};

/// Aggregates are arithmetic means of the raw per-fold / per-run values,
/// summed in fold/run index order.
struct SupervisedScores {
    double acc = 0.0;
    double auc = 0.0;
    std::vector<double> fold_acc;
    std::vector<double> fold_auc;
};

struct UnsupervisedScores {
    double clsacc = 0.0;
    double nmi = 0.0;
    std::vector<double> run_clsacc;
    std::vector<double> run_nmi;
};

namespace detail {

inline double mean_of(const std::vector<double>& values) {
    double total = 0.0;
    for (double v : values) total += v;
    return total / static_cast<double>(values.size());
}

inline Matrix take_rows(const Matrix& X, const std::vector<std::size_t>& rows) {
    Matrix out(static_cast<Eigen::Index>(rows.size()), X.cols());
    for (std::size_t i = 0; i < rows.size(); ++i) out.row(static_cast<Eigen::Index>(i)) = X.row(static_cast<Eigen::Index>(rows[i]));
    return out;
}

inline Labels take(const Labels& y, const std::vector<std::size_t>& rows) {
    Labels out(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) out[i] = y[rows[i]];
    return out;
}

}  // namespace detail

/// Random forest under stratified k-fold CV on the chosen columns.
inline SupervisedScores evaluate_supervised(const Dataset& ds, std::span<const std::size_t> subset, std::uint64_t seed,
                                            const SupervisedParams& params = {}) {
    const Labels& y = ds.labels();
    require(!subset.empty(), "evaluate_supervised: empty feature subset");
    const Matrix X = select_columns(ds.X, subset);
    const FoldPlan plan = stratified_folds(y, params.folds, derive_seed(seed, "folds"));
    SupervisedScores out;
    for (int f = 0; f < params.folds; ++f) {
        const auto train = plan.train_indices(f);
        const auto test = plan.test_indices(f);
        const Labels y_train = detail::take(y, train);
        const Labels y_test = detail::take(y, test);
        const ForestPrediction pred = rf_train_predict(detail::take_rows(X, train), y_train, detail::take_rows(X, test),
                                                       params.forest, derive_seed(seed, "forest", f), ds.class_count());
        out.fold_acc.push_back(accuracy(pred.predicted, y_test));
        out.fold_auc.push_back(auc(pred.scores, y_test));
    }
    out.acc = detail::mean_of(out.fold_acc);
    out.auc = detail::mean_of(out.fold_auc);
    return out;
}

/// k-means with k = number of classes, repeated `runs` times.
inline UnsupervisedScores evaluate_unsupervised(const Dataset& ds, std::span<const std::size_t> subset,
                                                std::uint64_t seed, const UnsupervisedParams& params = {}) {
    const Labels& y = ds.labels();
    require(!subset.empty(), "evaluate_unsupervised: empty feature subset");
    require(params.runs >= 1, "evaluate_unsupervised: needs at least one run");
    const Matrix X = select_columns(ds.X, subset);
    const std::size_t k = ds.class_count();
    UnsupervisedScores out;
    for (std::size_t r = 0; r < params.runs; ++r) {
        const KMeansResult km = kmeans(X, k, derive_seed(seed, "kmeans", r), params.kmeans);
        out.run_clsacc.push_back(clustering_accuracy(km.assignment, y));
        out.run_nmi.push_back(nmi(km.assignment, y));
    }
    out.clsacc = detail::mean_of(out.run_clsacc);
    out.nmi = detail::mean_of(out.run_nmi);
    return out;
}

}  // namespace fsbench

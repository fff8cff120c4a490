#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <numeric>
#include <set>

#include "fsbench/dataio/synth.hpp"
#include "fsbench/downstream/evaluate.hpp"
#include "fsbench/downstream/folds.hpp"
#include "fsbench/downstream/forest.hpp"
#include "fsbench/downstream/hungarian.hpp"
#include "fsbench/downstream/kmeans.hpp"
#include "fsbench/downstream/metrics.hpp"
#include "fsbench/random.hpp"

using namespace fsbench;

namespace {

double brute_force_assignment(const Matrix& cost) {
    std::vector<int> perm(static_cast<std::size_t>(cost.rows()));
    std::iota(perm.begin(), perm.end(), 0);
    double best = std::numeric_limits<double>::infinity();
    do {
        double total = 0.0;
        for (std::size_t i = 0; i < perm.size(); ++i) total += cost(static_cast<Eigen::Index>(i), perm[i]);
        best = std::min(best, total);
    } while (std::next_permutation(perm.begin(), perm.end()));
    return best;
}

// Best matched count over every injective map clusters -> labels.
double brute_force_clsacc(const Labels& clusters, const Labels& truth) {
    const int kc = *std::max_element(clusters.begin(), clusters.end()) + 1;
    const int kl = *std::max_element(truth.begin(), truth.end()) + 1;
    const int slots = std::max(kc, kl);
    std::vector<int> perm(static_cast<std::size_t>(slots));
    std::iota(perm.begin(), perm.end(), 0);
    std::size_t best = 0;
    do {
        std::size_t hits = 0;
        for (std::size_t i = 0; i < truth.size(); ++i) hits += perm[static_cast<std::size_t>(clusters[i])] == truth[i];
        best = std::max(best, hits);
    } while (std::next_permutation(perm.begin(), perm.end()));
    return static_cast<double>(best) / static_cast<double>(truth.size());
}

double pairwise_auc(const std::vector<double>& s, const std::vector<bool>& pos) {
    double num = 0.0, pairs = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (!pos[i]) continue;
        for (std::size_t j = 0; j < s.size(); ++j) {
            if (pos[j]) continue;
            pairs += 1.0;
            num += s[i] > s[j] ? 1.0 : (s[i] == s[j] ? 0.5 : 0.0);
        }
    }
    return num / pairs;
}

Labels random_labels(std::size_t n, int k, Rng& rng) {
    Labels out(n);
    for (auto& v : out) v = static_cast<int>(rng.index(static_cast<std::uint64_t>(k)));
    return out;
}

}  // namespace

TEST(StratifiedFolds, OneOfEachClassPerFold) {
    const Labels y{0, 0, 0, 0, 0, 1, 1, 1, 1, 1};
    const FoldPlan plan = stratified_folds(y, 5, 3);
    for (int f = 0; f < 5; ++f) {
        const auto test = plan.test_indices(f);
        ASSERT_EQ(test.size(), 2u);
        EXPECT_NE(y[test[0]], y[test[1]]);
    }
}

TEST(StratifiedFolds, Errors) {
    const Labels y{0, 0, 0, 1, 1, 1};
    EXPECT_THROW(stratified_folds(y, 1, 0), InvalidArgument);
    try {
        stratified_folds(Labels{0, 0, 0, 0, 1, 1}, 3, 0);
        FAIL();
    } catch (const InvalidArgument& e) {
        EXPECT_NE(std::string(e.what()).find("class 1"), std::string::npos);
    }
}

TEST(StratifiedFolds, DeterministicPartitionWithProportionalClasses) {
    Rng rng(5);
    for (int trial = 0; trial < 50; ++trial) {
        Labels y = random_labels(60 + static_cast<std::size_t>(trial), 3, rng);
        for (int c = 0; c < 3; ++c) y.insert(y.end(), 5, c);  // every class >= 5
        const FoldPlan a = stratified_folds(y, 5, static_cast<std::uint64_t>(trial));
        EXPECT_EQ(a.fold, stratified_folds(y, 5, static_cast<std::uint64_t>(trial)).fold);
        std::vector<std::size_t> seen(y.size(), 0);
        for (int f = 0; f < 5; ++f)
            for (std::size_t i : a.test_indices(f)) ++seen[i];
        for (std::size_t s : seen) ASSERT_EQ(s, 1u);
        for (int c = 0; c < 3; ++c) {
            const double total = static_cast<double>(std::count(y.begin(), y.end(), c));
            for (int f = 0; f < 5; ++f) {
                double in_fold = 0;
                for (std::size_t i : a.test_indices(f)) in_fold += y[i] == c;
                EXPECT_LT(std::abs(in_fold - total / 5.0), 1.0);
            }
        }
    }
}

TEST(RandomForest, FarBlobPointGetsFullVote) {
    const Dataset ds = synth_blobs(60, 3, 2, 3, 4, BlobOptions{.separation = 20.0});
    Matrix test(1, 3);
    test.row(0) = ds.X.row(1);  // a class-1 member
    test(0, 0) = test(0, 1) = test(0, 2) = 20.0;
    const auto pred = rf_train_predict(ds.X, *ds.y, test, ForestParams{}, 1);
    EXPECT_EQ(pred.predicted[0], 1);
    EXPECT_DOUBLE_EQ(pred.scores(0, 1), 1.0);
}

TEST(RandomForest, SingleTreeWithoutBootstrapFitsSeparablePoints) {
    const Matrix X{{0.0}, {1.0}, {2.0}, {3.0}};
    const Labels y{0, 0, 1, 1};
    const auto pred = rf_train_predict(X, y, X, ForestParams{.trees = 1, .bootstrap = false}, 9);
    EXPECT_EQ(pred.predicted, y);
    const Labels y2{0, 1, 0, 1};
    EXPECT_EQ(rf_train_predict(X, y2, X, ForestParams{.trees = 1, .bootstrap = false}, 9).predicted, y2);
}

TEST(RandomForest, DeterministicAndRowsSumToOne) {
    const Dataset ds = synth_blobs(90, 6, 3, 2, 12);
    const auto a = rf_train_predict(ds.X, *ds.y, ds.X, ForestParams{.trees = 30}, 5);
    const auto b = rf_train_predict(ds.X, *ds.y, ds.X, ForestParams{.trees = 30}, 5);
    EXPECT_EQ(a.scores, b.scores);
    for (Eigen::Index i = 0; i < a.scores.rows(); ++i) EXPECT_NEAR(a.scores.row(i).sum(), 1.0, 1e-12);
}

TEST(RandomForest, SingleClassTrainingIsAnError) {
    const Matrix X{{0.0}, {1.0}};
    EXPECT_THROW(rf_train_predict(X, Labels{1, 1}, X, ForestParams{}, 1), InvalidArgument);
}

TEST(Accuracy, ConfusionExample) {
    // TP=3, TN=2, FP=1, FN=0 with class 1 positive.
    const Labels truth{1, 1, 1, 0, 0, 0};
    const Labels pred{1, 1, 1, 0, 0, 1};
    const ConfusionCounts c = confusion(pred, truth, 1);
    EXPECT_EQ(c.tp, 3u);
    EXPECT_EQ(c.tn, 2u);
    EXPECT_EQ(c.fp, 1u);
    EXPECT_EQ(c.fn, 0u);
    EXPECT_EQ(c.total(), 6u);
    EXPECT_DOUBLE_EQ(accuracy(pred, truth), 5.0 / 6.0);
    EXPECT_DOUBLE_EQ(static_cast<double>(c.tp + c.tn) / static_cast<double>(c.total()), accuracy(pred, truth));
}

TEST(Accuracy, PerfectAndComplement) {
    const Labels y{0, 1, 1, 0};
    EXPECT_EQ(accuracy(y, y), 1.0);
    EXPECT_EQ(accuracy(Labels{1, 0, 0, 1}, y), 0.0);
    EXPECT_THROW(accuracy(Labels{0}, y), InvalidArgument);
}

TEST(Auc, PerfectTiedAndRandom) {
    const Labels truth{0, 0, 1, 1};
    Matrix s(4, 2);
    s.col(1) << 0.1, 0.2, 0.8, 0.9;
    s.col(0) = 1.0 - s.col(1).array();
    EXPECT_EQ(auc(s, truth), 1.0);
    s.setConstant(0.5);
    EXPECT_EQ(auc(s, truth), 0.5);

    Rng rng(10);
    Matrix r(2000, 2);
    Labels y(2000);
    for (Eigen::Index i = 0; i < 2000; ++i) {
        r(i, 1) = rng.uniform();
        r(i, 0) = 1.0 - r(i, 1);
        y[static_cast<std::size_t>(i)] = static_cast<int>(i % 2);
    }
    EXPECT_NEAR(auc(r, y), 0.5, 0.05);
}

TEST(Auc, MatchesPairEnumeration) {
    Rng rng(11);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t n = 2 + rng.index(199);
        std::vector<double> s(n);
        std::vector<bool> pos(n);
        for (std::size_t i = 0; i < n; ++i) {
            s[i] = std::round(rng.uniform() * 20.0) / 20.0;  // plenty of ties
            pos[i] = rng.uniform() < 0.4;
        }
        pos[0] = true;
        pos[1] = false;
        std::unique_ptr<bool[]> flags(new bool[n]);
        for (std::size_t i = 0; i < n; ++i) flags[i] = pos[i];
        EXPECT_NEAR(binary_auc(s, std::span<const bool>(flags.get(), n)), pairwise_auc(s, pos), 1e-12);
    }
}

TEST(Auc, MulticlassIsMacroOneVsRest) {
    Rng rng(12);
    Matrix s(30, 3);
    Labels y(30);
    for (Eigen::Index i = 0; i < 30; ++i) {
        for (Eigen::Index c = 0; c < 3; ++c) s(i, c) = rng.uniform();
        y[static_cast<std::size_t>(i)] = static_cast<int>(i % 3);
    }
    double expected = 0.0;
    for (int c = 0; c < 3; ++c) {
        std::vector<double> col(30);
        std::vector<bool> pos(30);
        for (std::size_t i = 0; i < 30; ++i) {
            col[i] = s(static_cast<Eigen::Index>(i), c);
            pos[i] = y[i] == c;
        }
        expected += pairwise_auc(col, pos) / 3.0;
    }
    EXPECT_NEAR(auc(s, y), expected, 1e-12);
    EXPECT_THROW(auc(s, Labels(30, 1)), InvalidArgument);
}

TEST(KMeans, SingleClusterIsColumnMean) {
    const Dataset ds = synth_blobs(37, 4, 2, 2, 3);
    const KMeansResult km = kmeans(ds.X, 1, 8);
    const Vector mean = ds.X.colwise().mean().transpose();
    EXPECT_LE((km.centroids.row(0).transpose() - mean).cwiseAbs().maxCoeff(), 1e-12);
    const double total = (ds.X.rowwise() - mean.transpose()).squaredNorm();
    EXPECT_NEAR(km.inertia, total, 1e-9 * total);
}

TEST(KMeans, SeparatedBlobsArePerfectlyClustered) {
    const Dataset ds = synth_blobs(100, 2, 2, 2, 3, BlobOptions{.separation = 15.0});
    for (std::uint64_t s = 0; s < 10; ++s) {
        EXPECT_EQ(clustering_accuracy(kmeans(ds.X, 2, s).assignment, *ds.y), 1.0);
    }
}

TEST(KMeans, InertiaNonIncreasingAndFixpoint) {
    for (std::uint64_t s = 0; s < 100; ++s) {
        const Dataset ds = synth_blobs(80, 3, 4, 2, s, BlobOptions{.separation = 1.5});
        const KMeansResult km = kmeans(ds.X, 4, s);
        for (std::size_t i = 1; i < km.inertia_history.size(); ++i) {
            ASSERT_LE(km.inertia_history[i], km.inertia_history[i - 1] * (1.0 + 1e-12)) << "seed " << s;
        }
        for (Eigen::Index i = 0; i < ds.X.rows(); ++i) {
            const int a = km.assignment[static_cast<std::size_t>(i)];
            for (Eigen::Index c = 0; c < 4; ++c) {
                ASSERT_LE((ds.X.row(i) - km.centroids.row(a)).squaredNorm(),
                          (ds.X.row(i) - km.centroids.row(c)).squaredNorm() + 1e-12);
            }
        }
    }
}

TEST(KMeans, DuplicatePointsStillYieldKNonEmptyClusters) {
    Matrix X = Matrix::Zero(10, 2);
    X(9, 0) = 1.0;
    const KMeansResult km = kmeans(X, 3, 1);
    std::set<int> used(km.assignment.begin(), km.assignment.end());
    EXPECT_EQ(used.size(), 3u);
}

TEST(KMeans, TooManyClusters) { EXPECT_THROW(kmeans(Matrix::Zero(3, 1), 4, 1), InvalidArgument); }

TEST(Hungarian, TwoByTwoExamples) {
    const Assignment a = hungarian(Matrix{{1, 2}, {2, 1}});
    EXPECT_EQ(a.row_to_col, (std::vector<std::size_t>{0, 1}));
    EXPECT_EQ(a.cost, 2.0);
    const Assignment b = hungarian(Matrix{{4, 1}, {2, 3}});
    EXPECT_EQ(b.row_to_col, (std::vector<std::size_t>{1, 0}));
    EXPECT_EQ(b.cost, 3.0);
}

TEST(Hungarian, MatchesPermutationEnumeration) {
    Rng rng(13);
    for (int trial = 0; trial < 200; ++trial) {
        const auto n = static_cast<Eigen::Index>(2 + rng.index(6));
        Matrix c(n, n);
        for (Eigen::Index i = 0; i < n; ++i)
            for (Eigen::Index j = 0; j < n; ++j) c(i, j) = static_cast<double>(rng.index(50)) - 10.0;
        const Assignment a = hungarian(c);
        ASSERT_EQ(a.cost, brute_force_assignment(c));
        std::set<std::size_t> cols(a.row_to_col.begin(), a.row_to_col.end());
        ASSERT_EQ(cols.size(), static_cast<std::size_t>(n));
    }
}

TEST(Hungarian, RectangularIsZeroPadded) {
    const Matrix c{{5, 1, 9}, {2, 8, 7}};
    const Assignment a = hungarian(c);
    EXPECT_EQ(a.cost, 3.0);
    EXPECT_EQ(a.row_to_col, (std::vector<std::size_t>{1, 0}));
    const Assignment t = hungarian(c.transpose());
    EXPECT_EQ(t.cost, 3.0);
    EXPECT_EQ(t.row_to_col[2], Assignment::unassigned);
    EXPECT_THROW(hungarian(Matrix(0, 0)), InvalidArgument);
}

TEST(ClusteringAccuracy, Examples) {
    EXPECT_EQ(clustering_accuracy(Labels{1, 1, 0, 0}, Labels{0, 0, 1, 1}), 1.0);
    EXPECT_EQ(clustering_accuracy(Labels{0, 1, 0, 1}, Labels{0, 0, 1, 1}), 0.5);
    EXPECT_EQ(clustering_accuracy(Labels{0, 1, 2}, Labels{0, 1, 2}), 1.0);
    EXPECT_THROW(clustering_accuracy(Labels{0, 1}, Labels{0, 1, 2}), InvalidArgument);
}

TEST(ClusteringAccuracy, MatchesEnumerationAndIsRelabelInvariant) {
    Rng rng(14);
    for (int trial = 0; trial < 150; ++trial) {
        const int kc = 1 + static_cast<int>(rng.index(6));
        const int kl = 1 + static_cast<int>(rng.index(6));
        const std::size_t n = 5 + rng.index(40);
        Labels c = random_labels(n, kc, rng);
        const Labels t = random_labels(n, kl, rng);
        const double value = clustering_accuracy(c, t);
        ASSERT_NEAR(value, brute_force_clsacc(c, t), 1e-15);
        std::vector<int> perm(static_cast<std::size_t>(kc));
        std::iota(perm.begin(), perm.end(), 0);
        rng.shuffle(std::span<int>(perm));
        for (auto& v : c) v = perm[static_cast<std::size_t>(v)] + 100;
        ASSERT_EQ(clustering_accuracy(c, t), value);
    }
}

TEST(Nmi, Examples) {
    EXPECT_EQ(nmi(Labels{0, 0, 1, 1, 2}, Labels{5, 5, 3, 3, 9}), 1.0);
    EXPECT_EQ(nmi(Labels{0, 0, 0, 0}, Labels{0, 0, 1, 1}), 0.0);
    EXPECT_EQ(nmi(Labels{0, 0, 0}, Labels{1, 1, 1}), 1.0);
    EXPECT_THROW(nmi(Labels{0}, Labels{0, 1}), InvalidArgument);
}

TEST(Nmi, ContingencyTwoZeroOneOne) {
    // Table [[2,0],[1,1]]: rows are clusters, columns labels.
    const Labels clusters{0, 0, 1, 1};
    const Labels truth{0, 0, 0, 1};
    const double h_c = std::log(2.0);
    const double h_l = -(0.75 * std::log(0.75) + 0.25 * std::log(0.25));
    const double h_l_given_c = 0.5 * 0.0 + 0.5 * std::log(2.0);
    const double expected = (h_l - h_l_given_c) / std::sqrt(h_c * h_l);
    EXPECT_NEAR(nmi(clusters, truth), expected, 1e-12);
}

TEST(Nmi, SymmetricAndBounded) {
    Rng rng(15);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t n = 1 + rng.index(100);
        const Labels a = random_labels(n, 1 + static_cast<int>(rng.index(5)), rng);
        const Labels b = random_labels(n, 1 + static_cast<int>(rng.index(5)), rng);
        const double ab = nmi(a, b);
        EXPECT_NEAR(ab, nmi(b, a), 1e-12);
        EXPECT_GE(ab, 0.0);
        EXPECT_LE(ab, 1.0);
    }
}

TEST(EvaluateSupervised, SeparableDataScoresHigh) {
    const Dataset ds = synth_blobs(200, 10, 2, 5, 21);
    std::vector<std::size_t> all(10);
    std::iota(all.begin(), all.end(), std::size_t{0});
    const SupervisedScores s = evaluate_supervised(ds, all, 1);
    EXPECT_GE(s.acc, 0.9);
    EXPECT_EQ(s.fold_acc.size(), 5u);
    const SupervisedScores again = evaluate_supervised(ds, all, 1);
    EXPECT_EQ(s.acc, again.acc);
    EXPECT_EQ(s.auc, again.auc);
}

TEST(EvaluateSupervised, SingleNoiseFeatureIsNearChance) {
    const Dataset ds = synth_blobs(200, 10, 2, 5, 21);
    const std::vector<std::size_t> noise{7};
    const SupervisedScores s = evaluate_supervised(ds, noise, 2);
    EXPECT_GE(s.auc, 0.35);
    EXPECT_LE(s.auc, 0.65);
}

TEST(EvaluateUnsupervised, InformativeFeaturesCluster) {
    const Dataset ds = synth_blobs(150, 10, 3, 4, 22);
    const std::vector<std::size_t> informative{0, 1, 2, 3};
    const UnsupervisedScores s = evaluate_unsupervised(ds, informative, 3);
    EXPECT_GE(s.clsacc, 0.95);
    EXPECT_EQ(s.run_clsacc.size(), 10u);
    const UnsupervisedScores again = evaluate_unsupervised(ds, informative, 3);
    EXPECT_EQ(s.clsacc, again.clsacc);
    EXPECT_EQ(s.nmi, again.nmi);
}

TEST(EvaluateUnsupervised, NoiseOnlyIsPoor) {
    const Dataset ds = synth_blobs(200, 10, 2, 2, 23);
    const std::vector<std::size_t> noise{4, 5, 6, 7, 8, 9};
    EXPECT_LE(evaluate_unsupervised(ds, noise, 4).clsacc, 0.75);
}

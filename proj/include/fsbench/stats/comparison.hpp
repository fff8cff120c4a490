#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "fsbench/dataio/dataset.hpp"
#include "fsbench/downstream/metrics.hpp"
#include "fsbench/error.hpp"
#include "fsbench/stats/significance.hpp"

namespace fsbench {

struct FriedmanRanks {
    std::vector<double> average;              // per method
    Matrix per_dataset;                       // methods x kept datasets
    std::vector<std::size_t> kept_datasets;   // column indices into the input
    std::vector<std::size_t> dropped_datasets;
};

/// scores: methods x datasets, NaN = missing. Datasets with any missing cell
/// are dropped. Rank 1 = highest score; ties share the average rank.
inline FriedmanRanks friedman_ranks(const Matrix& scores) {
    require(scores.rows() >= 2, "friedman_ranks: needs at least 2 methods");
    FriedmanRanks out;
    for (Eigen::Index j = 0; j < scores.cols(); ++j) {
        if (scores.col(j).array().isNaN().any()) {
            out.dropped_datasets.push_back(static_cast<std::size_t>(j));
        } else {
            out.kept_datasets.push_back(static_cast<std::size_t>(j));
        }
    }
    require(out.kept_datasets.size() >= 2, "friedman_ranks: needs at least 2 complete datasets");
    const Eigen::Index m = scores.rows();
    out.per_dataset.resize(m, static_cast<Eigen::Index>(out.kept_datasets.size()));
    std::vector<double> negated(static_cast<std::size_t>(m));
    for (std::size_t c = 0; c < out.kept_datasets.size(); ++c) {
        for (Eigen::Index i = 0; i < m; ++i) {
            negated[static_cast<std::size_t>(i)] = -scores(i, static_cast<Eigen::Index>(out.kept_datasets[c]));
        }
        const auto ranks = average_ranks(negated);
        for (Eigen::Index i = 0; i < m; ++i) out.per_dataset(i, static_cast<Eigen::Index>(c)) = ranks[static_cast<std::size_t>(i)];
    }
    out.average.resize(static_cast<std::size_t>(m));
    for (Eigen::Index i = 0; i < m; ++i) out.average[static_cast<std::size_t>(i)] = out.per_dataset.row(i).mean();
    return out;
}

struct PairwiseTest {
    std::size_t first = 0, second = 0;  // method indices, first < second
    double p_value = 1.0;
    double adjusted = 1.0;
};

struct ComparisonReport {
    std::vector<std::string> methods;
    std::vector<std::string> datasets;      // kept datasets, in input order
    std::vector<double> average_ranks;      // per method
    Matrix per_dataset_ranks;               // methods x datasets
    std::vector<PairwiseTest> pairs;
    std::vector<std::size_t> ordering;      // method indices, best (lowest rank) first
    std::vector<std::vector<std::size_t>> cliques;  // maximal non-significant groups, size >= 2
    double alpha = 0.05;
};

namespace detail {

inline void bron_kerbosch(const std::vector<std::vector<bool>>& adj, std::vector<std::size_t>& r,
                          std::vector<std::size_t> p, std::vector<std::size_t> x,
                          std::vector<std::vector<std::size_t>>& out) {
    if (p.empty() && x.empty()) {
        if (r.size() >= 2) out.push_back(r);
        return;
    }
    const std::vector<std::size_t> candidates = p;
    for (std::size_t v : candidates) {
        std::vector<std::size_t> np, nx;
        for (std::size_t u : p) if (adj[v][u]) np.push_back(u);
        for (std::size_t u : x) if (adj[v][u]) nx.push_back(u);
        r.push_back(v);
        bron_kerbosch(adj, r, std::move(np), std::move(nx), out);
        r.pop_back();
        p.erase(std::find(p.begin(), p.end(), v));
        x.push_back(v);
    }
}

}  // namespace detail

/// Orders methods by average rank and joins every maximal group whose
/// pairwise adjusted p-values are all >= alpha. `adjusted` is indexed by
/// method pair and must be symmetric.
inline ComparisonReport cd_layout(std::vector<std::string> methods, std::vector<double> average_ranks,
                                  const Matrix& adjusted, double alpha = 0.05) {
    const std::size_t m = methods.size();
    require(average_ranks.size() == m, "cd_layout: rank count does not match method count");
    require(adjusted.rows() == static_cast<Eigen::Index>(m) && adjusted.cols() == static_cast<Eigen::Index>(m),
            "cd_layout: p-value matrix has the wrong shape");
    require(alpha > 0.0 && alpha < 1.0, "cd_layout: alpha must be in (0, 1)");

    ComparisonReport report;
    report.alpha = alpha;
    report.ordering.resize(m);
    std::iota(report.ordering.begin(), report.ordering.end(), std::size_t{0});
    std::stable_sort(report.ordering.begin(), report.ordering.end(), [&](std::size_t a, std::size_t b) {
        if (average_ranks[a] != average_ranks[b]) return average_ranks[a] < average_ranks[b];
        return methods[a] < methods[b];
    });
    std::vector<std::size_t> position(m);
    for (std::size_t i = 0; i < m; ++i) position[report.ordering[i]] = i;

    std::vector<std::vector<bool>> adj(m, std::vector<bool>(m, false));
    for (std::size_t a = 0; a < m; ++a) {
        for (std::size_t b = 0; b < m; ++b) {
            adj[a][b] = a != b && adjusted(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) >= alpha;
        }
    }
    std::vector<std::size_t> r;
    detail::bron_kerbosch(adj, r, report.ordering, {}, report.cliques);
    for (auto& clique : report.cliques) {
        std::sort(clique.begin(), clique.end(), [&](std::size_t a, std::size_t b) { return position[a] < position[b]; });
    }
    std::sort(report.cliques.begin(), report.cliques.end(), [&](const auto& a, const auto& b) {
        std::vector<std::size_t> pa, pb;
        for (auto v : a) pa.push_back(position[v]);
        for (auto v : b) pb.push_back(position[v]);
        return pa < pb;
    });

    report.methods = std::move(methods);
    report.average_ranks = std::move(average_ranks);
    return report;
}

/// Full comparison over a methods x datasets score table (higher = better):
/// average ranks, pairwise Wilcoxon across datasets, Holm over all pairs,
/// then the clique layout.
inline ComparisonReport compare_methods(const std::vector<std::string>& methods,
                                        const std::vector<std::string>& datasets, const Matrix& scores,
                                        double alpha = 0.05) {
    require(scores.rows() == static_cast<Eigen::Index>(methods.size()), "compare_methods: method count mismatch");
    require(scores.cols() == static_cast<Eigen::Index>(datasets.size()), "compare_methods: dataset count mismatch");
    const FriedmanRanks ranks = friedman_ranks(scores);
    const std::size_t m = methods.size();

    std::vector<PairwiseTest> pairs;
    std::vector<double> raw;
    for (std::size_t a = 0; a < m; ++a) {
        for (std::size_t b = a + 1; b < m; ++b) {
            std::vector<double> xa, xb;
            for (std::size_t c : ranks.kept_datasets) {
                xa.push_back(scores(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(c)));
                xb.push_back(scores(static_cast<Eigen::Index>(b), static_cast<Eigen::Index>(c)));
            }
            const double p = wilcoxon_signed_rank(xa, xb).p_value;
            pairs.push_back({a, b, p, p});
            raw.push_back(p);
        }
    }
    const auto adjusted = holm_adjust(raw);
    Matrix adjusted_matrix = Matrix::Ones(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(m));
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        pairs[i].adjusted = adjusted[i];
        adjusted_matrix(static_cast<Eigen::Index>(pairs[i].first), static_cast<Eigen::Index>(pairs[i].second)) = adjusted[i];
        adjusted_matrix(static_cast<Eigen::Index>(pairs[i].second), static_cast<Eigen::Index>(pairs[i].first)) = adjusted[i];
    }

    ComparisonReport report = cd_layout(methods, ranks.average, adjusted_matrix, alpha);
    report.pairs = std::move(pairs);
    report.per_dataset_ranks = ranks.per_dataset;
    for (std::size_t c : ranks.kept_datasets) report.datasets.push_back(datasets[c]);
    return report;
}

}  // namespace fsbench

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "fsbench/error.hpp"

namespace fsbench {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Labels = std::vector<int>;

/// Dense numeric dataset: n instances (rows) by d features (columns), with
/// optional class labels remapped to {0..c-1}. Immutable once built.
struct Dataset {
    std::string name;
    Matrix X;
    std::optional<Labels> y;
    std::vector<std::string> feature_names;
    std::vector<std::string> class_names;

    std::size_t instance_count() const { return static_cast<std::size_t>(X.rows()); }
    std::size_t feature_count() const { return static_cast<std::size_t>(X.cols()); }
    bool labeled() const { return y.has_value(); }

    std::size_t class_count() const {
        if (!y || y->empty()) return 0;
        int top = 0;
        for (int v : *y) top = std::max(top, v);
        return static_cast<std::size_t>(top) + 1;
    }

    const Labels& labels() const {
        if (!y) throw InvalidArgument("dataset '" + name + "' has no labels");
        return *y;
    }
};

/// Throws if the dataset breaks its shape or finiteness invariants.
inline void validate(const Dataset& ds) {
    require(ds.X.rows() >= 2, "dataset '" + ds.name + "' needs at least 2 instances");
    require(ds.X.cols() >= 1, "dataset '" + ds.name + "' needs at least 1 feature");
    require(ds.X.allFinite(), "dataset '" + ds.name + "' contains non-finite values");
    if (ds.y) {
        require(ds.y->size() == ds.instance_count(),
                "dataset '" + ds.name + "' label count does not match instance count");
        std::vector<bool> seen(ds.class_count(), false);
        for (int v : *ds.y) {
            require(v >= 0, "dataset '" + ds.name + "' has negative labels");
            seen[static_cast<std::size_t>(v)] = true;
        }
        for (bool s : seen) require(s, "dataset '" + ds.name + "' labels are not contiguous");
    }
}

/// Copy of the given columns, in the given order.
inline Matrix select_columns(const Matrix& X, std::span<const std::size_t> columns) {
    Matrix out(X.rows(), static_cast<Eigen::Index>(columns.size()));
    for (std::size_t j = 0; j < columns.size(); ++j) {
        require(columns[j] < static_cast<std::size_t>(X.cols()), "column index out of range");
        out.col(static_cast<Eigen::Index>(j)) = X.col(static_cast<Eigen::Index>(columns[j]));
    }
    return out;
}

inline bool column_is_constant(const Matrix& X, Eigen::Index j) {
    const double first = X(0, j);
    for (Eigen::Index i = 1; i < X.rows(); ++i) {
        if (X(i, j) != first) return false;
    }
    return true;
}

/// Population (divide-by-n) variance of each column.
inline Vector population_variance(const Matrix& X) {
    const Eigen::Index n = X.rows();
    Vector out(X.cols());
    for (Eigen::Index j = 0; j < X.cols(); ++j) {
        if (column_is_constant(X, j)) {
            out(j) = 0.0;
            continue;
        }
        const double mean = X.col(j).mean();
        out(j) = (X.col(j).array() - mean).square().sum() / static_cast<double>(n);
    }
    return out;
}

struct StandardizationParams {
    Vector mean;
    Vector std;  // strictly positive; 1 for zero-variance features
};

/// Per-feature zero mean and unit population std. Constant features become
/// all-zero and record std = 1.
inline std::pair<Dataset, StandardizationParams> standardize(const Dataset& ds) {
    Dataset out = ds;
    StandardizationParams params{Vector(ds.X.cols()), Vector(ds.X.cols())};
    const double n = static_cast<double>(ds.X.rows());
    for (Eigen::Index j = 0; j < ds.X.cols(); ++j) {
        const double mean = ds.X.col(j).mean();
        params.mean(j) = mean;
        if (column_is_constant(ds.X, j)) {
            params.std(j) = 1.0;
            out.X.col(j).setZero();
            continue;
        }
        const double sd = std::sqrt((ds.X.col(j).array() - mean).square().sum() / n);
        params.std(j) = sd > 0.0 ? sd : 1.0;
        out.X.col(j) = (ds.X.col(j).array() - mean) / params.std(j);
    }
    return {std::move(out), std::move(params)};
}

}  // namespace fsbench

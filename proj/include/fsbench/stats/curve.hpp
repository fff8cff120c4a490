#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "fsbench/error.hpp"

namespace fsbench {

struct CurvePoint {
    double x = 0.0;  // selected-feature count or fraction
    double value = 0.0;
};

/// Metric observations over a strictly increasing x grid.
struct MetricCurve {
    std::vector<CurvePoint> points;

    double a() const { return points.front().x; }
    double b() const { return points.back().x; }

    void validate() const {
        if (points.size() < 2) throw InvalidArgument("metric curve needs at least 2 points");
        for (std::size_t i = 1; i < points.size(); ++i) {
            if (!(points[i].x > points[i - 1].x)) {
                throw InvalidArgument("metric curve x values must be strictly increasing (point " + std::to_string(i) +
                                      ")");
            }
        }
    }

    /// Piecewise-linear interpolant; x must lie in [a, b].
    double interpolate(double x) const {
        if (x <= points.front().x) return points.front().value;
        for (std::size_t i = 1; i < points.size(); ++i) {
            if (x <= points[i].x) {
                const auto& p = points[i - 1];
                const auto& q = points[i];
                const double t = (x - p.x) / (q.x - p.x);
                return p.value + t * (q.value - p.value);
            }
        }
        return points.back().value;
    }
};

/// Mean of the piecewise-linear interpolant over [a, b] (exact trapezoid).
inline double fsdem(const MetricCurve& curve) {
    curve.validate();
    double area = 0.0;
    for (std::size_t i = 1; i < curve.points.size(); ++i) {
        const auto& p = curve.points[i - 1];
        const auto& q = curve.points[i];
        area += 0.5 * (q.x - p.x) * (p.value + q.value);
    }
    return area / (curve.b() - curve.a());
}

/// Per-x mean and (population) standard deviation of the random baseline
/// across its repetitions.
struct RandomBaselineStats {
    std::vector<double> x;
    std::vector<double> mean;
    std::vector<double> stddev;
    std::size_t repetitions = 0;

    /// rows = repetitions, each a value per x (same order as `grid`).
    static RandomBaselineStats from_repetitions(std::vector<double> grid,
                                                const std::vector<std::vector<double>>& rows) {
        require(!rows.empty(), "random baseline needs at least one repetition");
        RandomBaselineStats s;
        s.x = std::move(grid);
        s.repetitions = rows.size();
        s.mean.assign(s.x.size(), 0.0);
        s.stddev.assign(s.x.size(), 0.0);
        for (std::size_t j = 0; j < s.x.size(); ++j) {
            double total = 0.0;
            for (const auto& r : rows) {
                require(r.size() == s.x.size(), "random baseline repetition has the wrong length");
                total += r[j];
            }
            const double mu = total / static_cast<double>(rows.size());
            double sq = 0.0;
            for (const auto& r : rows) sq += (r[j] - mu) * (r[j] - mu);
            s.mean[j] = mu;
            s.stddev[j] = std::sqrt(sq / static_cast<double>(rows.size()));
        }
        return s;
    }

    std::size_t index_of(double at) const {
        for (std::size_t j = 0; j < x.size(); ++j) {
            if (std::abs(x[j] - at) <= 1e-12 * std::max(1.0, std::abs(at))) return j;
        }
        throw InvalidArgument("x = " + std::to_string(at) + " is not on the random-baseline grid");
    }
};

struct ZScore {
    double z = 0.0;
    bool degenerate = false;  // sigma was 0 and p != mu; z is +-inf
};

/// (p - mu) / sigma at grid point x. With sigma = 0: 0 when p == mu,
/// otherwise a signed infinity flagged as degenerate.
inline ZScore zscore(double p, const RandomBaselineStats& base, double x) {
    const std::size_t j = base.index_of(x);
    const double mu = base.mean[j];
    const double sigma = base.stddev[j];
    require(std::isfinite(sigma), "zscore: random-baseline sigma is not finite");
    if (sigma > 0.0) return {(p - mu) / sigma, false};
    if (p == mu) return {0.0, false};
    return {p > mu ? std::numeric_limits<double>::infinity() : -std::numeric_limits<double>::infinity(), true};
}

}  // namespace fsbench

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <span>
#include <vector>

#include "fsbench/downstream/metrics.hpp"
#include "fsbench/error.hpp"

namespace fsbench {

struct WilcoxonResult {
    double p_value = 1.0;       // two-sided
    double w_plus = 0.0;        // sum of ranks of positive differences
    std::size_t nonzero = 0;    // differences left after dropping zeros
    bool exact = true;
};

inline constexpr std::size_t wilcoxon_exact_limit = 20;

/// Paired two-sided Wilcoxon signed-rank test. Zero differences are dropped;
/// |d| ties get average ranks. Up to 20 non-zero differences the null
/// distribution of W+ is exact over all 2^m sign patterns; beyond that a
/// normal approximation with tie and continuity correction is used. All-zero
/// differences give p = 1.
inline WilcoxonResult wilcoxon_signed_rank(std::span<const double> x, std::span<const double> y) {
    require(x.size() == y.size(), "wilcoxon: paired samples must have equal length");
    std::vector<double> diffs;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double d = x[i] - y[i];
        require(!std::isnan(d), "wilcoxon: NaN in paired samples");
        if (d != 0.0) diffs.push_back(d);
    }
    WilcoxonResult out;
    out.nonzero = diffs.size();
    if (diffs.empty()) return out;

    std::vector<double> magnitude(diffs.size());
    std::transform(diffs.begin(), diffs.end(), magnitude.begin(), [](double d) { return std::abs(d); });
    const std::vector<double> ranks = average_ranks(magnitude);
    const std::size_t m = diffs.size();
    for (std::size_t i = 0; i < m; ++i) {
        if (diffs[i] > 0.0) out.w_plus += ranks[i];
    }

    if (m <= wilcoxon_exact_limit) {
        // Doubled ranks are integers even with ties; count sign patterns per
        // doubled W+ total.
        std::vector<std::size_t> doubled(m);
        for (std::size_t i = 0; i < m; ++i) doubled[i] = static_cast<std::size_t>(std::llround(2.0 * ranks[i]));
        const std::size_t max_sum = std::accumulate(doubled.begin(), doubled.end(), std::size_t{0});
        std::vector<std::uint64_t> ways(max_sum + 1, 0);
        ways[0] = 1;
        std::size_t reach = 0;
        for (std::size_t r : doubled) {
            for (std::size_t s = reach + 1; s-- > 0;) {
                if (ways[s]) ways[s + r] += ways[s];
            }
            reach += r;
        }
        const auto observed = static_cast<std::size_t>(std::llround(2.0 * out.w_plus));
        std::uint64_t lower = 0, upper = 0;
        for (std::size_t s = 0; s <= max_sum; ++s) {
            if (s <= observed) lower += ways[s];
            if (s >= observed) upper += ways[s];
        }
        const double total = std::ldexp(1.0, static_cast<int>(m));
        out.p_value = std::min(1.0, 2.0 * static_cast<double>(std::min(lower, upper)) / total);
        out.exact = true;
        return out;
    }

    const double md = static_cast<double>(m);
    const double mean = md * (md + 1.0) / 4.0;
    double tie_term = 0.0;
    {
        std::vector<double> sorted = magnitude;
        std::sort(sorted.begin(), sorted.end());
        for (std::size_t i = 0; i < sorted.size();) {
            std::size_t j = i;
            while (j + 1 < sorted.size() && sorted[j + 1] == sorted[i]) ++j;
            const double t = static_cast<double>(j - i + 1);
            tie_term += t * t * t - t;
            i = j + 1;
        }
    }
    const double variance = md * (md + 1.0) * (2.0 * md + 1.0) / 24.0 - tie_term / 48.0;
    const double z = std::max(0.0, std::abs(out.w_plus - mean) - 0.5) / std::sqrt(variance);
    out.p_value = std::min(1.0, std::erfc(z / std::sqrt(2.0)));
    out.exact = false;
    return out;
}

/// Holm step-down adjustment, returned in input order.
inline std::vector<double> holm_adjust(std::span<const double> p_values) {
    for (double p : p_values) {
        require(p >= 0.0 && p <= 1.0, "holm_adjust: p-value " + std::to_string(p) + " outside [0, 1]");
    }
    const std::size_t m = p_values.size();
    std::vector<std::size_t> order(m);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return p_values[a] < p_values[b]; });
    std::vector<double> adjusted(m);
    double running = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        const double scaled = std::min(1.0, static_cast<double>(m - i) * p_values[order[i]]);
        running = std::max(running, scaled);
        adjusted[order[i]] = running;
    }
    return adjusted;
}

}  // namespace fsbench

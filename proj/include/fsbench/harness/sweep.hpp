#pragma once

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "fsbench/dataio/dataset.hpp"
#include "fsbench/downstream/evaluate.hpp"
#include "fsbench/error.hpp"
#include "fsbench/harness/records.hpp"
#include "fsbench/harness/registry.hpp"
#include "fsbench/harness/sweep_spec.hpp"
#include "fsbench/random.hpp"
#include "fsbench/stats/curve.hpp"

namespace fsbench {

struct SweepConfig {
    std::size_t repetitions = 100;  // for stochastic selectors
    SupervisedParams supervised;
    UnsupervisedParams unsupervised;
    std::uint64_t seed = 0;
    std::size_t threads = 1;
    bool record_timings = false;  // off: runtime fields are 0 so stores are reproducible byte for byte
    bool standardize = true;
};

struct SweepResult {
    std::vector<EvalRecord> records;
    /// stochastic method -> metric -> per-fraction mean/std over successful repetitions
    std::map<std::string, std::map<Metric, RandomBaselineStats>> baseline;
};

struct SweepCell {
    std::string method;
    std::size_t repetition = 0;
};

struct SweepHooks {
    std::function<void(const EvalRecord&)> sink;                  // called in deterministic order
    std::function<void(std::size_t done, std::size_t total)> progress;
};

inline std::vector<SweepCell> plan_cells(const std::vector<std::string>& methods, const SelectorRegistry& registry,
                                         std::size_t repetitions) {
    registry.check(methods);
    require(repetitions >= 1, "repetitions must be at least 1");
    std::vector<SweepCell> cells;
    for (const auto& m : methods) {
        const std::size_t reps = registry.get(m).stochastic ? repetitions : 1;
        for (std::size_t r = 0; r < reps; ++r) cells.push_back({m, r});
    }
    return cells;
}

/// Checks the dataset can go through both downstream tasks.
inline void check_sweep_dataset(const Dataset& ds, const SweepConfig& config) {
    validate(ds);
    require(ds.labeled(), ds.name + ": sweep needs a labeled dataset");
    const std::size_t c = ds.class_count();
    require(c >= 2, ds.name + ": sweep needs at least 2 classes");
    std::vector<std::size_t> sizes(c, 0);
    for (int v : ds.labels()) ++sizes[static_cast<std::size_t>(v)];
    for (std::size_t j = 0; j < c; ++j) {
        require(sizes[j] >= static_cast<std::size_t>(config.supervised.folds),
                ds.name + ": class " + std::to_string(j) + " has " + std::to_string(sizes[j]) +
                    " instances, fewer than the " + std::to_string(config.supervised.folds) + " folds");
    }
}

namespace detail {

using ms_clock = std::chrono::steady_clock;

inline double elapsed_ms(ms_clock::time_point since) {
    return std::chrono::duration<double, std::milli>(ms_clock::now() - since).count();
}

inline std::vector<EvalRecord> run_cell(const Dataset& ds, const Selector& selector, const SweepCell& cell,
                                        const std::vector<double>& grid, const SweepConfig& config) {
    const std::uint64_t cell_seed = derive_seed(config.seed, ds.name, cell.method, cell.repetition);
    std::vector<EvalRecord> out;
    auto emit = [&](double fraction, std::size_t k, Metric m, double value, double sel_ms, double ev_ms,
                    const std::string* error) {
        EvalRecord r;
        r.dataset = ds.name;
        r.method = cell.method;
        r.repetition = cell.repetition;
        r.fraction = fraction;
        r.k = k;
        r.metric = m;
        r.value = error ? 0.0 : value;
        r.selector_ms = config.record_timings ? sel_ms : 0.0;
        r.eval_ms = config.record_timings ? ev_ms : 0.0;
        r.seed = cell_seed;
        r.ok = error == nullptr;
        if (error) r.error = *error;
        out.push_back(std::move(r));
    };
    const std::size_t d = ds.feature_count();

    std::optional<FeatureRanking> ranking;
    double selector_ms = 0.0;
    try {
        const auto t0 = ms_clock::now();
        ranking = selector.rank(ds, derive_seed(cell_seed, "ranking"));
        selector_ms = elapsed_ms(t0);
        require(ranking->size() == d, cell.method + ": ranking has " + std::to_string(ranking->size()) +
                                          " features, dataset has " + std::to_string(d));
    } catch (const std::exception& e) {
        const std::string msg = e.what();
        for (double f : grid)
            for (Metric m : all_metrics) emit(f, fraction_to_count(f, d), m, 0.0, 0.0, 0.0, &msg);
        return out;
    }

    for (std::size_t g = 0; g < grid.size(); ++g) {
        const double f = grid[g];
        const std::size_t k = fraction_to_count(f, d);
        // Same downstream seed for every method at a grid point: paired comparisons.
        const std::uint64_t eval_seed = derive_seed(config.seed, ds.name, "eval", g);
        try {
            const auto subset = top_k(*ranking, k);
            auto t0 = ms_clock::now();
            const SupervisedScores sup = evaluate_supervised(ds, subset, eval_seed, config.supervised);
            const double sup_ms = elapsed_ms(t0);
            t0 = ms_clock::now();
            const UnsupervisedScores uns = evaluate_unsupervised(ds, subset, eval_seed, config.unsupervised);
            const double uns_ms = elapsed_ms(t0);
            emit(f, k, Metric::acc, sup.acc, selector_ms, sup_ms, nullptr);
            emit(f, k, Metric::auc, sup.auc, selector_ms, sup_ms, nullptr);
            emit(f, k, Metric::clsacc, uns.clsacc, selector_ms, uns_ms, nullptr);
            emit(f, k, Metric::nmi, uns.nmi, selector_ms, uns_ms, nullptr);
        } catch (const std::exception& e) {
            const std::string msg = e.what();
            for (Metric m : all_metrics) emit(f, k, m, 0.0, selector_ms, 0.0, &msg);
        }
    }
    return out;
}

}  // namespace detail

/// Evaluates every configured method over the sweep grid. Deterministic
/// selectors rank once; stochastic ones rank once per repetition. Records
/// come out ordered by (method as listed, repetition, fraction, metric)
/// regardless of thread count.
inline SweepResult run_sweep(const Dataset& raw, const std::vector<std::string>& methods, const SweepSpec& spec,
                             const SweepConfig& config, const SelectorRegistry& registry, const SweepHooks& hooks = {}) {
    const std::vector<SweepCell> cells = plan_cells(methods, registry, config.repetitions);
    const std::vector<double> grid = spec.grid();
    check_sweep_dataset(raw, config);
    const Dataset ds = config.standardize ? standardize(raw).first : raw;

    std::vector<std::vector<EvalRecord>> slots(cells.size());
    std::vector<char> ready(cells.size(), 0);
    std::mutex mu;
    std::condition_variable cv;
    std::atomic<std::size_t> next{0};

    auto worker = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= cells.size()) return;
            auto recs = detail::run_cell(ds, registry.get(cells[i].method), cells[i], grid, config);
            {
                std::lock_guard lock(mu);
                slots[i] = std::move(recs);
                ready[i] = 1;
            }
            cv.notify_all();
        }
    };

    const std::size_t threads = std::max<std::size_t>(1, std::min(config.threads, cells.size()));
    std::vector<std::jthread> pool;
    if (threads > 1)
        for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);

    SweepResult result;
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (threads == 1) {
            slots[i] = detail::run_cell(ds, registry.get(cells[i].method), cells[i], grid, config);
        } else {
            std::unique_lock lock(mu);
            cv.wait(lock, [&] { return ready[i] != 0; });
        }
        for (const auto& r : slots[i]) {
            if (hooks.sink) hooks.sink(r);
            result.records.push_back(r);
        }
        slots[i].clear();
        if (hooks.progress) hooks.progress(i + 1, cells.size());
    }
    pool.clear();

    // Baseline statistics from the successful repetitions of each stochastic method.
    for (const auto& m : methods) {
        if (!registry.get(m).stochastic) continue;
        for (Metric metric : all_metrics) {
            std::map<std::size_t, std::vector<double>> rows;
            std::map<std::size_t, bool> complete;
            for (const auto& r : result.records) {
                if (r.method != m || r.metric != metric) continue;
                rows[r.repetition].push_back(r.value);
                complete.try_emplace(r.repetition, true);
                if (!r.ok) complete[r.repetition] = false;
            }
            std::vector<std::vector<double>> good;
            for (auto& [rep, values] : rows)
                if (complete[rep]) good.push_back(std::move(values));
            if (!good.empty()) result.baseline[m][metric] = RandomBaselineStats::from_repetitions(grid, good);
        }
    }
    return result;
}

}  // namespace fsbench

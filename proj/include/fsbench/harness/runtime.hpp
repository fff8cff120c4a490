#pragma once

#include <chrono>
#include <cstdint>
#include <algorithm>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "fsbench/dataio/dataset.hpp"
#include "fsbench/dataio/synth.hpp"
#include "fsbench/error.hpp"
#include "fsbench/harness/records.hpp"
#include "fsbench/harness/registry.hpp"
#include "fsbench/process.hpp"
#include "fsbench/random.hpp"

namespace fsbench {

struct RuntimeGrid {
    RuntimeDimension dimension = RuntimeDimension::features;
    std::size_t fixed = 100;
    std::size_t start = 1000;
    std::size_t stop = 20000;
    std::size_t step = 500;
    std::chrono::duration<double> cap{3600.0};

    std::vector<std::size_t> values() const {
        require(start >= 1 && step >= 1 && start <= stop, "runtime grid: need 1 <= start <= stop and step >= 1");
        require(fixed >= 1, "runtime grid: fixed size must be at least 1");
        require(cap.count() > 0.0, "runtime grid: cap must be positive");
        std::vector<std::size_t> out;
        for (std::size_t v = start; v <= stop; v += step) out.push_back(v);
        return out;
    }
};

enum class Isolation {
    fork,    // selector runs in a child process that is killed at the cap
    inline_  // selector runs in this process; over-cap runs are measured to completion
};

struct RuntimeConfig {
    std::uint64_t seed = 0;
    std::size_t classes = 2;
    std::size_t informative = 10;  // clipped to the feature count
    Isolation isolation = Isolation::fork;
};

struct RuntimeHooks {
    std::function<void(const RuntimeRecord&)> sink;
};

namespace detail {

struct TimedRun {
    double seconds = 0.0;
    bool over_cap = false;
    std::string error;  // empty on success
};

inline TimedRun time_selector(const Selector& s, const Dataset& ds, std::uint64_t seed,
                              std::chrono::duration<double> cap, Isolation isolation) {
    using clock = std::chrono::steady_clock;
    if (isolation == Isolation::inline_) {
        TimedRun run;
        const auto t0 = clock::now();
        try {
            s.rank(ds, seed);
        } catch (const std::exception& e) {
            run.error = e.what();
        }
        run.seconds = std::chrono::duration<double>(clock::now() - t0).count();
        run.over_cap = run.error.empty() && run.seconds > cap.count();
        return run;
    }
    const ProcessResult child = run_forked(
        [&] {
            const auto t0 = clock::now();
            try {
                s.rank(ds, seed);
            } catch (const std::exception& e) {
                return std::string("error ") + e.what();
            }
            const double secs = std::chrono::duration<double>(clock::now() - t0).count();
            char buf[64];
            std::snprintf(buf, sizeof buf, "ok %.17g", secs);
            return std::string(buf);
        },
        cap);
    TimedRun run;
    if (child.timed_out) {
        run.seconds = child.elapsed.count();
        run.over_cap = true;
    } else if (child.exit_code == 0 && child.output.rfind("ok ", 0) == 0) {
        run.seconds = std::stod(child.output.substr(3));
        run.over_cap = run.seconds > cap.count();
    } else if (child.output.rfind("error ", 0) == 0) {
        run.seconds = child.elapsed.count();
        run.error = child.output.substr(6);
    } else {
        run.seconds = child.elapsed.count();
        run.error = "selector process ended abnormally (exit code " + std::to_string(child.exit_code) + ")";
    }
    return run;
}

}  // namespace detail

/// Times full-ranking selection on synthetic data along the grid. Methods run
/// serially in grid order; after the first over-cap (or failed) point of a
/// method, its larger points are skipped.
inline std::vector<RuntimeRecord> run_runtime_bench(const std::vector<std::string>& methods, const RuntimeGrid& grid,
                                                    const RuntimeConfig& config, const SelectorRegistry& registry,
                                                    const RuntimeHooks& hooks = {}) {
    registry.check(methods);
    const std::vector<std::size_t> values = grid.values();
    std::vector<RuntimeRecord> out;
    for (const auto& m : methods) {
        const Selector& s = registry.get(m);
        for (std::size_t v : values) {
            const std::size_t n = grid.dimension == RuntimeDimension::instances ? v : grid.fixed;
            const std::size_t d = grid.dimension == RuntimeDimension::instances ? grid.fixed : v;
            const std::uint64_t data_seed = derive_seed(config.seed, "runtime", dimension_name(grid.dimension), n, d);
            Dataset ds = synth_blobs(n, d, config.classes, std::min(config.informative, d), data_seed);
            ds = standardize(ds).first;
            const auto run = detail::time_selector(s, ds, derive_seed(data_seed, m), grid.cap, config.isolation);
            RuntimeRecord r;
            r.method = m;
            r.dimension = grid.dimension;
            r.instances = n;
            r.features = d;
            r.seconds = run.seconds;
            r.over_cap = run.over_cap;
            r.seed = data_seed;
            r.ok = run.error.empty();
            r.error = run.error;
            if (hooks.sink) hooks.sink(r);
            out.push_back(r);
            if (run.over_cap || !r.ok) break;
        }
    }
    return out;
}

}  // namespace fsbench

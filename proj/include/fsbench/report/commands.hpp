#pragma once

// Subcommand bodies. Each returns a process exit status and writes
// diagnostics to `err`; tools/fsbench.cpp only parses flags.

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "fsbench/dataio/csv.hpp"
#include "fsbench/dataio/synth.hpp"
#include "fsbench/error.hpp"
#include "fsbench/harness/config.hpp"
#include "fsbench/harness/records.hpp"
#include "fsbench/harness/runtime.hpp"
#include "fsbench/harness/sweep.hpp"
#include "fsbench/report/analysis.hpp"
#include "fsbench/report/svg.hpp"

namespace fsbench {

enum class PlotKind { sweep, zscore, runtime, cdd };

inline PlotKind parse_plot_kind(const std::string& text) {
    if (text == "sweep") return PlotKind::sweep;
    if (text == "zscore") return PlotKind::zscore;
    if (text == "runtime") return PlotKind::runtime;
    if (text == "cdd") return PlotKind::cdd;
    throw InvalidArgument("unknown plot kind '" + text + "' (expected sweep, zscore, runtime or cdd)");
}

struct PlotSpec {
    PlotKind kind = PlotKind::sweep;
    std::optional<Metric> metric;
    std::optional<std::string> dataset;
    std::filesystem::path output;
    std::string baseline = "random";
    double alpha = 0.05;
};

// ---- plot assembly --------------------------------------------------------

inline SweepPlot sweep_plot(const RecordIndex& index, const std::string& dataset, Metric metric,
                            const std::string& baseline) {
    SweepPlot plot;
    plot.title = dataset + ": " + metric_name(metric) + " by selected-feature fraction";
    plot.y_label = metric_name(metric);
    for (const auto& method : index.methods_on(dataset)) {
        const MethodCurves* c = index.find(dataset, method, metric);
        if (!c || c->repetitions.empty()) continue;
        const RandomBaselineStats s = c->stats();
        plot.lines.push_back({method, c->x, s.mean, {}});
        if (method == baseline) {
            Band b{method, c->x, {}, {}};
            for (std::size_t i = 0; i < c->x.size(); ++i) {
                b.lo.push_back(s.mean[i] - s.stddev[i]);
                b.hi.push_back(s.mean[i] + s.stddev[i]);
            }
            plot.band = b;
        }
    }
    return plot;
}

inline ZPlot z_plot(const std::vector<ZRow>& rows, const std::string& dataset, Metric metric,
                    const std::string& baseline) {
    ZPlot plot;
    plot.title = dataset + ": " + metric_name(metric) + " Z-score against " + baseline;
    std::map<std::string, Series> by_method;
    for (const auto& r : rows) {
        if (r.dataset != dataset || r.metric != metric || r.method == baseline) continue;
        Series& s = by_method[r.method];
        s.name = r.method;
        s.x.push_back(r.fraction);
        s.y.push_back(r.z.z);
    }
    for (auto& [_, s] : by_method) plot.lines.push_back(std::move(s));
    return plot;
}

inline RuntimePlot runtime_plot(const std::vector<RuntimeRecord>& records) {
    RuntimePlot plot;
    std::map<std::string, Series> by_method;
    std::optional<RuntimeDimension> dim;
    std::size_t fixed = 0;
    for (const auto& r : records) {
        if (!r.ok) continue;
        dim = r.dimension;
        fixed = r.dimension == RuntimeDimension::instances ? r.features : r.instances;
        Series& s = by_method[r.method];
        s.name = r.method;
        s.x.push_back(static_cast<double>(r.grid_value()));
        s.y.push_back(r.seconds);
        s.flagged.push_back(r.over_cap);
    }
    const std::string varying = dim ? dimension_name(*dim) : "size";
    plot.title = "Selector runtime, " + varying + " varying" +
                 (dim ? " (" + std::string(*dim == RuntimeDimension::instances ? "features" : "instances") + " = " +
                            std::to_string(fixed) + ")"
                      : std::string());
    plot.x_label = "number of " + varying;
    for (auto& [_, s] : by_method) plot.lines.push_back(std::move(s));
    return plot;
}

namespace detail {

inline void write_text(const std::filesystem::path& path, const std::string& text) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw InvalidArgument("cannot write " + path.string());
    out << text;
    if (!out) throw Error("write to " + path.string() + " failed");
}

inline std::vector<Dataset> load_datasets(const BenchConfig& config) {
    std::vector<Dataset> out;
    const CsvOptions csv = config.csv_options();
    for (const auto& path : config.dataset_paths()) {
        if (!std::filesystem::exists(path)) throw InvalidArgument("dataset file not found: " + path.string());
        out.push_back(load_csv(path, csv));
    }
    return out;
}

inline std::string fixed3(double v) { return svg_num(v, 3); }

}  // namespace detail

/// Renders one plot from a record store.
inline std::string render_plot(const PlotSpec& spec, const RecordStore& store) {
    if (spec.kind == PlotKind::runtime) {
        require(store.kind == StoreKind::runtime && !store.runtime.empty(), "runtime plot needs runtime records");
        return render_runtime(runtime_plot(store.runtime));
    }
    require(store.kind == StoreKind::eval && !store.eval.empty(), "this plot needs sweep records");
    require(spec.metric.has_value(), "plot needs --metric");
    const RecordIndex index(store.eval);
    AnalysisOptions opts;
    opts.baseline = spec.baseline;
    opts.alpha = spec.alpha;
    opts.metrics = {*spec.metric};
    if (spec.kind == PlotKind::cdd) {
        opts.dataset.reset();
        std::vector<std::string> warnings;
        const auto rows = fsdem_table(index, opts, &warnings);
        const auto cd = cd_tables(index, rows, opts, &warnings);
        if (cd.empty()) throw InvalidArgument(warnings.empty() ? "no CD data" : warnings.back());
        return render_cd(cd.front().report, "Critical difference, " + metric_name(*spec.metric) + " FSDEM");
    }
    require(spec.dataset.has_value(), "plot needs --dataset");
    require(index.datasets().count(*spec.dataset) != 0, "no records for dataset '" + *spec.dataset + "'");
    if (spec.kind == PlotKind::sweep) return render_sweep(sweep_plot(index, *spec.dataset, *spec.metric, spec.baseline));
    opts.dataset = spec.dataset;
    return render_zscore(z_plot(z_table(index, opts), *spec.dataset, *spec.metric, spec.baseline));
}

// ---- run ------------------------------------------------------------------

struct RunOptions {
    std::filesystem::path config;
    std::optional<std::filesystem::path> store;
    std::optional<std::uint64_t> seed;
    bool dry_run = false;
    bool quiet = false;  // no progress counters
    std::function<void(SelectorRegistry&)> customize;  // extra selectors
};

/// Per-method mean FSDEM per metric, averaged over datasets.
inline std::string fsdem_summary(const std::vector<FsdemRow>& rows) {
    std::map<std::string, std::map<Metric, std::pair<double, std::size_t>>> acc;
    for (const auto& r : rows) {
        auto& cell = acc[r.method][r.metric];
        cell.first += r.fsdem;
        cell.second += 1;
    }
    std::ostringstream out;
    char line[160];
    std::snprintf(line, sizeof line, "%-16s %8s %8s %8s %8s\n", "method", "ACC", "AUC", "CLSACC", "NMI");
    out << "mean FSDEM over datasets\n" << line;
    for (const auto& [method, by_metric] : acc) {
        std::string cells[4];
        for (std::size_t i = 0; i < 4; ++i) {
            const auto it = by_metric.find(all_metrics[i]);
            cells[i] = it == by_metric.end() ? "-" : detail::fixed3(it->second.first / static_cast<double>(it->second.second));
        }
        std::snprintf(line, sizeof line, "%-16s %8s %8s %8s %8s\n", method.c_str(), cells[0].c_str(), cells[1].c_str(),
                      cells[2].c_str(), cells[3].c_str());
        out << line;
    }
    return out.str();
}

inline int cmd_run(const RunOptions& options, std::ostream& out, std::ostream& err) {
    try {
        BenchConfig config = load_config(options.config);
        if (options.store) config.store = *options.store;
        if (options.seed) config.seed = *options.seed;
        SelectorRegistry registry = config.registry();
        if (options.customize) options.customize(registry);
        registry.check(config.methods);
        const std::vector<Dataset> datasets = detail::load_datasets(config);
        const SweepConfig sweep_config = config.sweep_config();
        const std::vector<double> grid = config.sweep.grid();
        for (const auto& ds : datasets) check_sweep_dataset(ds, sweep_config);

        if (options.dry_run) {
            std::size_t total = 0;
            for (const auto& ds : datasets) {
                const std::size_t cells = plan_cells(config.methods, registry, config.repetitions).size() * grid.size();
                out << ds.name << " (" << ds.instance_count() << " x " << ds.feature_count() << "): " << cells
                    << " cells\n";
                total += cells;
            }
            out << "planned cells (method x k x repetition): " << total << "\n";
            out << "planned records: " << total * 4 << "\n";
            return 0;
        }

        RecordWriter writer(config.store, StoreKind::eval, config.append);
        std::vector<EvalRecord> all;
        for (const auto& ds : datasets) {
            SweepHooks hooks;
            hooks.sink = [&writer](const EvalRecord& r) { writer.write(r); };
            if (!options.quiet) {
                hooks.progress = [&err, &ds](std::size_t done, std::size_t total) {
                    err << ds.name << ": " << done << "/" << total << " cells\n";
                };
            }
            SweepResult result = run_sweep(ds, config.methods, config.sweep, sweep_config, registry, hooks);
            std::size_t failed = 0;
            for (const auto& r : result.records) failed += !r.ok;
            if (failed) err << "warning: " << ds.name << ": " << failed << " failure records\n";
            all.insert(all.end(), std::make_move_iterator(result.records.begin()),
                       std::make_move_iterator(result.records.end()));
        }
        writer.flush();
        AnalysisOptions aopts;
        aopts.alpha = config.alpha;
        const RecordIndex index(all);
        out << fsdem_summary(fsdem_table(index, aopts));
        out << "records written to " << config.store.string() << "\n";
        return 0;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
}

// ---- runtime --------------------------------------------------------------

struct RuntimeOptions {
    std::filesystem::path config;
    std::optional<std::filesystem::path> store;
    std::optional<std::uint64_t> seed;
    bool dry_run = false;
    std::function<void(SelectorRegistry&)> customize;
};

inline int cmd_runtime(const RuntimeOptions& options, std::ostream& out, std::ostream& err) {
    try {
        BenchConfig config = load_config(options.config);
        if (options.store) config.runtime_store = *options.store;
        if (options.seed) config.seed = *options.seed;
        SelectorRegistry registry = config.registry();
        if (options.customize) options.customize(registry);
        const auto& methods = config.runtime_methods.empty() ? config.methods : config.runtime_methods;
        registry.check(methods);
        const auto values = config.runtime.values();
        if (options.dry_run) {
            out << "planned runtime points (method x grid): " << methods.size() * values.size() << "\n";
            return 0;
        }
        RecordWriter writer(config.runtime_store, StoreKind::runtime, config.append);
        RuntimeHooks hooks;
        hooks.sink = [&](const RuntimeRecord& r) {
            writer.write(r);
            out << r.method << " " << r.instances << "x" << r.features << ": ";
            if (!r.ok) {
                out << "failed (" << r.error << "), skipping larger sizes\n";
            } else if (r.over_cap) {
                out << svg_num(r.seconds, 3) << " s over the " << svg_num(config.runtime.cap.count(), 0)
                    << " s cap, skipping larger sizes\n";
            } else {
                out << svg_num(r.seconds, 6) << " s\n";
            }
        };
        run_runtime_bench(methods, config.runtime, config.runtime_config(), registry, hooks);
        out << "records written to " << config.runtime_store.string() << "\n";
        return 0;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
}

// ---- analyze --------------------------------------------------------------

struct AnalyzeOptions {
    std::filesystem::path store;
    std::filesystem::path out = "report";
    double alpha = 0.05;
    std::optional<std::string> metric;
    std::optional<std::string> dataset;
    std::string baseline = "random";
};

/// Writes the FSDEM table, Z table, CD data and plots. Missing inputs for an
/// output produce a warning, not a failure.
inline int cmd_analyze(const AnalyzeOptions& options, std::ostream& out, std::ostream& err) {
    try {
        const RecordStore store = load_store(options.store);
        std::vector<std::string> written;
        auto emit = [&](const std::string& name, const std::string& text) {
            detail::write_text(options.out / name, text);
            written.push_back(name);
        };
        if (store.kind == StoreKind::runtime && !store.empty_file) {
            emit("runtime.csv", runtime_csv(store.runtime));
            if (store.runtime.empty()) {
                err << "warning: no runtime records, plot skipped\n";
            } else {
                emit("runtime.svg", render_runtime(runtime_plot(store.runtime)));
            }
        } else {
            AnalysisOptions aopts;
            aopts.alpha = options.alpha;
            aopts.baseline = options.baseline;
            aopts.dataset = options.dataset;
            if (options.metric) aopts.metrics = {parse_metric(*options.metric)};
            const Analysis a = analyze(store.eval, aopts);
            for (const auto& w : a.warnings) err << "warning: " << w << "\n";
            emit("fsdem.csv", fsdem_csv(a.fsdem));
            emit("zscore.csv", z_csv(a.z));
            for (const auto& cd : a.cd) {
                const std::string m = metric_name(cd.metric);
                emit("cd_" + m + ".json", cd_json(cd));
                emit("ranks_" + m + ".csv", ranks_csv(cd));
                emit("cd_" + m + ".svg", render_cd(cd.report, "Critical difference, " + m + " FSDEM"));
            }
            if (!store.eval.empty()) {
                const RecordIndex index(store.eval);
                for (const auto& ds : selected_datasets(index, aopts)) {
                    for (Metric metric : aopts.metrics) {
                        const SweepPlot sp = sweep_plot(index, ds, metric, aopts.baseline);
                        if (!sp.lines.empty()) emit("sweep_" + ds + "_" + metric_name(metric) + ".svg", render_sweep(sp));
                        const ZPlot zp = z_plot(a.z, ds, metric, aopts.baseline);
                        if (!zp.lines.empty()) emit("zscore_" + ds + "_" + metric_name(metric) + ".svg", render_zscore(zp));
                    }
                }
            }
        }
        for (const auto& name : written) out << (options.out / name).string() << "\n";
        return 0;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
}

// ---- plot -----------------------------------------------------------------

struct PlotOptions {
    std::filesystem::path store;
    std::filesystem::path out;
    std::string kind = "sweep";
    std::optional<std::string> metric;
    std::optional<std::string> dataset;
    double alpha = 0.05;
};

inline int cmd_plot(const PlotOptions& options, std::ostream& out, std::ostream& err) {
    try {
        PlotSpec spec;
        spec.kind = parse_plot_kind(options.kind);
        if (options.metric) spec.metric = parse_metric(*options.metric);
        spec.dataset = options.dataset;
        spec.output = options.out;
        spec.alpha = options.alpha;
        detail::write_text(spec.output, render_plot(spec, load_store(options.store)));
        out << spec.output.string() << "\n";
        return 0;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
}

// ---- synth ----------------------------------------------------------------

struct SynthOptions {
    std::filesystem::path out;
    std::size_t instances = 100;
    std::size_t features = 20;
    std::size_t classes = 2;
    std::size_t informative = 5;
    std::uint64_t seed = 0;
    BlobOptions blobs;
    bool header = false;
};

inline int cmd_synth(const SynthOptions& options, std::ostream& out, std::ostream& err) {
    try {
        Dataset ds = synth_blobs(options.instances, options.features, options.classes, options.informative,
                                 options.seed, options.blobs);
        if (options.out.has_parent_path()) std::filesystem::create_directories(options.out.parent_path());
        write_csv(options.out, ds, CsvWriteOptions{.header = options.header, .labels = true});
        out << options.out.string() << ": " << ds.instance_count() << " x " << ds.feature_count() << ", "
            << options.classes << " classes\n";
        return 0;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
}

}  // namespace fsbench

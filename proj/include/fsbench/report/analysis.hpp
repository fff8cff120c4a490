#pragma once

#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include <nlohmann/json.hpp>

#include "fsbench/dataio/csv.hpp"
#include "fsbench/error.hpp"
#include "fsbench/harness/records.hpp"
#include "fsbench/stats/comparison.hpp"
#include "fsbench/stats/curve.hpp"

namespace fsbench {

/// Per-(dataset, method, metric) curves rebuilt from raw records. Only
/// repetitions with no failed record enter the statistics.
struct MethodCurves {
    std::vector<double> x;                       // fractions, increasing
    std::vector<std::size_t> k;
    std::vector<std::vector<double>> repetitions;  // successful repetitions, ascending id
    std::size_t failed_repetitions = 0;

    bool usable() const { return !repetitions.empty() && x.size() >= 2; }

    /// Per-x mean and population std over the successful repetitions.
    RandomBaselineStats stats() const { return RandomBaselineStats::from_repetitions(x, repetitions); }

    MetricCurve mean_curve() const {
        const RandomBaselineStats s = stats();
        MetricCurve c;
        for (std::size_t i = 0; i < x.size(); ++i) c.points.push_back({x[i], s.mean[i]});
        return c;
    }
};

class RecordIndex {
public:
    explicit RecordIndex(const std::vector<EvalRecord>& records) {
        std::set<std::tuple<std::string, std::string, std::size_t, double, int>> seen;
        // (dataset, method, metric) -> repetition -> fraction -> record
        std::map<std::tuple<std::string, std::string, Metric>,
                 std::map<std::size_t, std::map<double, const EvalRecord*>>>
            grouped;
        for (const auto& r : records) {
            if (!seen.emplace(r.dataset, r.method, r.repetition, r.fraction, static_cast<int>(r.metric)).second) {
                throw InvalidArgument("duplicate record for dataset " + r.dataset + ", method " + r.method +
                                      ", repetition " + std::to_string(r.repetition) + ", fraction " +
                                      detail::format_real(r.fraction) + ", metric " + metric_name(r.metric));
            }
            grouped[{r.dataset, r.method, r.metric}][r.repetition][r.fraction] = &r;
        }
        for (auto& [key, reps] : grouped) {
            MethodCurves c;
            bool grid_set = false;
            for (auto& [rep, by_x] : reps) {
                std::vector<double> xs, vs;
                std::vector<std::size_t> ks;
                bool ok = true;
                for (auto& [x, r] : by_x) {
                    xs.push_back(x);
                    ks.push_back(r->k);
                    vs.push_back(r->value);
                    ok = ok && r->ok;
                }
                if (!grid_set) {
                    c.x = xs;
                    c.k = ks;
                    grid_set = true;
                } else if (xs != c.x) {
                    throw InvalidArgument("repetitions of " + std::get<1>(key) + " on " + std::get<0>(key) +
                                          " cover different fraction grids");
                }
                if (ok) {
                    c.repetitions.push_back(std::move(vs));
                } else {
                    ++c.failed_repetitions;
                }
            }
            curves_.emplace(key, std::move(c));
            datasets_.insert(std::get<0>(key));
            methods_.insert(std::get<1>(key));
        }
    }

    const std::set<std::string>& datasets() const { return datasets_; }
    const std::set<std::string>& methods() const { return methods_; }

    const MethodCurves* find(const std::string& dataset, const std::string& method, Metric metric) const {
        const auto it = curves_.find({dataset, method, metric});
        return it == curves_.end() ? nullptr : &it->second;
    }

    std::vector<std::string> methods_on(const std::string& dataset) const {
        std::set<std::string> out;
        for (const auto& [key, _] : curves_)
            if (std::get<0>(key) == dataset) out.insert(std::get<1>(key));
        return {out.begin(), out.end()};
    }

private:
    std::map<std::tuple<std::string, std::string, Metric>, MethodCurves> curves_;
    std::set<std::string> datasets_;
    std::set<std::string> methods_;
};

struct FsdemRow {
    std::string dataset, method;
    Metric metric = Metric::acc;
    std::size_t repetitions = 0;
    std::size_t failed_repetitions = 0;
    double fsdem = 0.0;          // of the mean curve
    double repetition_mean = 0.0;  // mean of per-repetition FSDEMs
    double repetition_std = 0.0;   // population std of per-repetition FSDEMs
};

struct ZRow {
    std::string dataset, method;
    Metric metric = Metric::acc;
    double fraction = 0.0;
    std::size_t k = 0;
    double value = 0.0;  // mean over repetitions
    double baseline_mean = 0.0;
    double baseline_std = 0.0;
    ZScore z;
};

struct AnalysisOptions {
    std::string baseline = "random";
    double alpha = 0.05;
    std::vector<Metric> metrics{std::begin(all_metrics), std::end(all_metrics)};
    std::optional<std::string> dataset;  // restrict to one dataset
};

struct CdResult {
    Metric metric = Metric::acc;
    ComparisonReport report;
    std::vector<std::string> dropped_datasets;
    Matrix fsdem;  // methods x kept datasets
};

struct Analysis {
    std::vector<FsdemRow> fsdem;
    std::vector<ZRow> z;
    std::vector<CdResult> cd;
    std::vector<std::string> warnings;
};

inline std::vector<std::string> selected_datasets(const RecordIndex& index, const AnalysisOptions& options) {
    if (!options.dataset) return {index.datasets().begin(), index.datasets().end()};
    require(index.datasets().count(*options.dataset) != 0, "no records for dataset '" + *options.dataset + "'");
    return {*options.dataset};
}

inline std::vector<FsdemRow> fsdem_table(const RecordIndex& index, const AnalysisOptions& options,
                                         std::vector<std::string>* warnings = nullptr) {
    std::vector<FsdemRow> rows;
    for (const auto& ds : selected_datasets(index, options)) {
        for (const auto& method : index.methods_on(ds)) {
            for (Metric metric : options.metrics) {
                const MethodCurves* c = index.find(ds, method, metric);
                if (!c) continue;
                if (!c->usable()) {
                    if (warnings) {
                        warnings->push_back(method + " on " + ds + " (" + metric_name(metric) +
                                            "): no complete repetition with at least 2 grid points");
                    }
                    continue;
                }
                FsdemRow row{ds, method, metric, c->repetitions.size(), c->failed_repetitions};
                row.fsdem = fsdem(c->mean_curve());
                std::vector<double> per;
                for (const auto& values : c->repetitions) {
                    MetricCurve rc;
                    for (std::size_t i = 0; i < c->x.size(); ++i) rc.points.push_back({c->x[i], values[i]});
                    per.push_back(fsdem(rc));
                }
                double total = 0.0;
                for (double v : per) total += v;
                row.repetition_mean = total / static_cast<double>(per.size());
                double sq = 0.0;
                for (double v : per) sq += (v - row.repetition_mean) * (v - row.repetition_mean);
                row.repetition_std = std::sqrt(sq / static_cast<double>(per.size()));
                rows.push_back(row);
            }
        }
    }
    return rows;
}

inline std::vector<ZRow> z_table(const RecordIndex& index, const AnalysisOptions& options,
                                 std::vector<std::string>* warnings = nullptr) {
    std::vector<ZRow> rows;
    for (const auto& ds : selected_datasets(index, options)) {
        for (Metric metric : options.metrics) {
            const MethodCurves* base = index.find(ds, options.baseline, metric);
            if (!base || base->repetitions.empty()) {
                if (warnings) {
                    warnings->push_back("Z-scores for " + ds + " (" + metric_name(metric) + ") skipped: no '" +
                                        options.baseline + "' baseline records");
                }
                continue;
            }
            const RandomBaselineStats stats = base->stats();
            for (const auto& method : index.methods_on(ds)) {
                const MethodCurves* c = index.find(ds, method, metric);
                if (!c || c->repetitions.empty()) continue;
                if (c->x != base->x) {
                    if (warnings) warnings->push_back(method + " on " + ds + ": fraction grid differs from the baseline");
                    continue;
                }
                const RandomBaselineStats own = c->stats();
                for (std::size_t i = 0; i < c->x.size(); ++i) {
                    ZRow row{ds, method, metric, c->x[i], c->k[i], own.mean[i], stats.mean[i], stats.stddev[i]};
                    row.z = zscore(own.mean[i], stats, c->x[i]);
                    rows.push_back(row);
                }
            }
        }
    }
    return rows;
}

/// Critical-difference data per metric over FSDEM (higher is better).
inline std::vector<CdResult> cd_tables(const RecordIndex& index, const std::vector<FsdemRow>& fsdem_rows,
                                       const AnalysisOptions& options, std::vector<std::string>* warnings = nullptr) {
    std::vector<CdResult> out;
    const auto datasets = selected_datasets(index, options);
    for (Metric metric : options.metrics) {
        std::set<std::string> method_set;
        std::map<std::pair<std::string, std::string>, double> value;
        for (const auto& r : fsdem_rows) {
            if (r.metric != metric) continue;
            method_set.insert(r.method);
            value[{r.method, r.dataset}] = r.fsdem;
        }
        const std::vector<std::string> methods(method_set.begin(), method_set.end());
        Matrix scores(static_cast<Eigen::Index>(methods.size()), static_cast<Eigen::Index>(datasets.size()));
        std::vector<std::string> dropped;
        std::vector<std::string> kept;
        for (std::size_t j = 0; j < datasets.size(); ++j) {
            bool complete = true;
            for (std::size_t i = 0; i < methods.size(); ++i) {
                const auto it = value.find({methods[i], datasets[j]});
                scores(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                    it == value.end() ? std::numeric_limits<double>::quiet_NaN() : it->second;
                complete = complete && it != value.end();
            }
            (complete ? kept : dropped).push_back(datasets[j]);
        }
        if (warnings) {
            for (const auto& d : dropped) {
                warnings->push_back("CD " + metric_name(metric) + ": dataset " + d + " dropped (missing method results)");
            }
        }
        if (methods.size() < 2 || kept.size() < 2) {
            if (warnings) {
                warnings->push_back("CD " + metric_name(metric) + " skipped: needs at least 2 methods on at least 2 "
                                    "complete datasets (have " + std::to_string(methods.size()) + " methods, " +
                                    std::to_string(kept.size()) + " datasets)");
            }
            continue;
        }
        CdResult cd;
        cd.metric = metric;
        cd.report = compare_methods(methods, datasets, scores, options.alpha);
        cd.dropped_datasets = dropped;
        cd.fsdem.resize(scores.rows(), static_cast<Eigen::Index>(kept.size()));
        Eigen::Index col = 0;
        for (Eigen::Index j = 0; j < scores.cols(); ++j) {
            if (!scores.col(j).array().isNaN().any()) cd.fsdem.col(col++) = scores.col(j);
        }
        out.push_back(std::move(cd));
    }
    return out;
}

inline Analysis analyze(const std::vector<EvalRecord>& records, const AnalysisOptions& options = {}) {
    const RecordIndex index(records);
    Analysis a;
    if (index.datasets().empty()) {
        a.warnings.push_back("record store holds no sweep records");
        return a;
    }
    a.fsdem = fsdem_table(index, options, &a.warnings);
    a.z = z_table(index, options, &a.warnings);
    a.cd = cd_tables(index, a.fsdem, options, &a.warnings);
    return a;
}

// ---- text output ----------------------------------------------------------

inline std::string csv_number(double v) {
    if (std::isnan(v)) return "nan";
    return detail::format_real(v);
}

inline std::string fsdem_csv(const std::vector<FsdemRow>& rows) {
    std::ostringstream out;
    out << "dataset,method,metric,repetitions,failed_repetitions,fsdem,repetition_mean,repetition_std\n";
    for (const auto& r : rows) {
        out << r.dataset << ',' << r.method << ',' << metric_name(r.metric) << ',' << r.repetitions << ','
            << r.failed_repetitions << ',' << csv_number(r.fsdem) << ',' << csv_number(r.repetition_mean) << ','
            << csv_number(r.repetition_std) << '\n';
    }
    return out.str();
}

inline std::string z_csv(const std::vector<ZRow>& rows) {
    std::ostringstream out;
    out << "dataset,method,metric,fraction,k,value,baseline_mean,baseline_std,z,degenerate\n";
    for (const auto& r : rows) {
        out << r.dataset << ',' << r.method << ',' << metric_name(r.metric) << ',' << csv_number(r.fraction) << ','
            << r.k << ',' << csv_number(r.value) << ',' << csv_number(r.baseline_mean) << ','
            << csv_number(r.baseline_std) << ',' << csv_number(r.z.z) << ',' << (r.z.degenerate ? "true" : "false")
            << '\n';
    }
    return out.str();
}

inline std::string ranks_csv(const CdResult& cd) {
    std::ostringstream out;
    out << "dataset,method,fsdem,rank\n";
    const auto& rep = cd.report;
    for (std::size_t j = 0; j < rep.datasets.size(); ++j) {
        for (std::size_t i = 0; i < rep.methods.size(); ++i) {
            const auto r = static_cast<Eigen::Index>(i);
            const auto c = static_cast<Eigen::Index>(j);
            out << rep.datasets[j] << ',' << rep.methods[i] << ',' << csv_number(cd.fsdem(r, c)) << ','
                << csv_number(rep.per_dataset_ranks(r, c)) << '\n';
        }
    }
    return out.str();
}

/// Structured critical-difference document.
inline std::string cd_json(const CdResult& cd) {
    using json = nlohmann::ordered_json;
    const auto& rep = cd.report;
    json j;
    j["metric"] = metric_name(cd.metric);
    j["alpha"] = rep.alpha;
    j["datasets"] = rep.datasets;
    j["dropped_datasets"] = cd.dropped_datasets;
    json methods = json::array();
    for (std::size_t pos = 0; pos < rep.ordering.size(); ++pos) {
        const std::size_t i = rep.ordering[pos];
        methods.push_back({{"name", rep.methods[i]}, {"average_rank", rep.average_ranks[i]}, {"position", pos}});
    }
    j["methods"] = methods;  // best first
    json pairs = json::array();
    for (const auto& p : rep.pairs) {
        pairs.push_back({{"first", rep.methods[p.first]},
                         {"second", rep.methods[p.second]},
                         {"p_value", p.p_value},
                         {"adjusted", p.adjusted},
                         {"significant", p.adjusted < rep.alpha}});
    }
    j["pairs"] = pairs;
    json cliques = json::array();
    for (const auto& c : rep.cliques) {
        json names = json::array();
        for (std::size_t i : c) names.push_back(rep.methods[i]);
        cliques.push_back(names);
    }
    j["cliques"] = cliques;
    return j.dump(2) + "\n";
}

inline std::string runtime_csv(const std::vector<RuntimeRecord>& rows) {
    std::ostringstream out;
    out << "method,dimension,instances,features,seconds,over_cap,status,error\n";
    for (const auto& r : rows) {
        std::string err = r.error;
        for (char& ch : err)
            if (ch == ',' || ch == '\n' || ch == '\r') ch = ' ';
        out << r.method << ',' << dimension_name(r.dimension) << ',' << r.instances << ',' << r.features << ','
            << csv_number(r.seconds) << ',' << (r.over_cap ? "true" : "false") << ',' << (r.ok ? "ok" : "failed")
            << ',' << err << '\n';
    }
    return out.str();
}

}  // namespace fsbench

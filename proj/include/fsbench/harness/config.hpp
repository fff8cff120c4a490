#pragma once

// Flat configuration file:
//
//   # comment
//   key = value
//
// One assignment per line; blank lines and lines whose first non-space
// character is '#' are ignored. Keys may appear once. Lists are comma
// separated. Relative paths resolve against the config file's directory.

#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "fsbench/dataio/csv.hpp"
#include "fsbench/error.hpp"
#include "fsbench/harness/registry.hpp"
#include "fsbench/harness/runtime.hpp"
#include "fsbench/harness/sweep.hpp"
#include "fsbench/harness/sweep_spec.hpp"

namespace fsbench {

struct BenchConfig {
    std::filesystem::path datasets_dir = ".";
    std::vector<std::string> datasets;  // empty: every *.csv in datasets_dir
    bool header = false;
    std::string label_column = "last";

    std::vector<std::string> methods{"random", "variance", "correlation", "laplacian", "mcfs"};
    std::map<std::string, std::string> external;  // method name -> command
    double external_timeout = 3600.0;

    SweepSpec sweep = SweepSpec::full();
    std::size_t repetitions = 100;
    int cv_folds = 5;
    std::size_t kmeans_runs = 10;
    std::size_t forest_trees = 100;
    double alpha = 0.05;
    std::uint64_t seed = 0;
    std::size_t threads = 1;
    bool record_timings = false;
    bool standardize = true;
    bool append = false;

    std::size_t k_neighbors = 5;
    std::size_t mcfs_eigen = 5;
    double mcfs_l1_ratio = 0.01;

    std::filesystem::path store = "records.jsonl";
    std::filesystem::path runtime_store = "runtime.jsonl";
    std::filesystem::path out = "report";

    std::vector<std::string> runtime_methods;  // empty: same as methods
    RuntimeGrid runtime;
    std::size_t runtime_classes = 2;
    std::size_t runtime_informative = 10;
    Isolation runtime_isolation = Isolation::fork;

    SweepConfig sweep_config() const {
        SweepConfig c;
        c.repetitions = repetitions;
        c.supervised.folds = cv_folds;
        c.supervised.forest.trees = forest_trees;
        c.unsupervised.runs = kmeans_runs;
        c.seed = seed;
        c.threads = threads;
        c.record_timings = record_timings;
        c.standardize = standardize;
        return c;
    }

    RuntimeConfig runtime_config() const {
        return RuntimeConfig{seed, runtime_classes, runtime_informative, runtime_isolation};
    }

    SelectorRegistry registry() const {
        SelectorParams p;
        p.graph.k_neighbors = k_neighbors;
        p.mcfs.graph = p.graph;
        p.mcfs.n_eigen = mcfs_eigen;
        p.mcfs.l1_ratio = mcfs_l1_ratio;
        p.external_timeout = std::chrono::duration<double>(external_timeout);
        SelectorRegistry r = SelectorRegistry::builtin(p);
        for (const auto& [name, command] : external) r.add_external(name, command, p.external_timeout);
        return r;
    }

    CsvOptions csv_options() const { return CsvOptions{header, parse_label_column(label_column)}; }

    /// Dataset files in load order.
    std::vector<std::filesystem::path> dataset_paths() const {
        std::vector<std::filesystem::path> out;
        if (!datasets.empty()) {
            for (const auto& name : datasets) {
                std::filesystem::path p = datasets_dir / name;
                if (!p.has_extension()) p += ".csv";
                out.push_back(p);
            }
            return out;
        }
        if (!std::filesystem::is_directory(datasets_dir)) {
            throw InvalidArgument("datasets directory " + datasets_dir.string() + " does not exist");
        }
        for (const auto& entry : std::filesystem::directory_iterator(datasets_dir)) {
            if (entry.is_regular_file() && entry.path().extension() == ".csv") out.push_back(entry.path());
        }
        std::sort(out.begin(), out.end());
        require(!out.empty(), "no .csv files in " + datasets_dir.string());
        return out;
    }
};

namespace detail {

inline std::vector<std::string> split_list(std::string_view text) {
    std::vector<std::string> out;
    for (auto field : split_fields(text)) {
        const auto item = trim(field);
        if (item.empty()) throw InvalidArgument("empty list item");
        out.emplace_back(item);
    }
    return out;
}

inline bool parse_bool(std::string_view text) {
    if (text == "true") return true;
    if (text == "false") return false;
    throw InvalidArgument("expected true or false");
}

template <typename T>
T parse_unsigned(std::string_view text) {
    T v{};
    const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc() || end != text.data() + text.size()) throw InvalidArgument("expected a non-negative integer");
    return v;
}

inline double parse_number(std::string_view text) {
    const auto v = parse_real(text);
    if (!v) throw InvalidArgument("expected a number");
    return *v;
}

}  // namespace detail

inline BenchConfig parse_config(std::string_view text, const std::filesystem::path& base_dir = ".") {
    using namespace detail;
    BenchConfig c;
    auto path_of = [&](std::string_view v) {
        std::filesystem::path p{std::string(v)};
        return p.is_absolute() ? p : (base_dir / p).lexically_normal();
    };
    c.datasets_dir = path_of(c.datasets_dir.string());
    c.store = path_of(c.store.string());
    c.runtime_store = path_of(c.runtime_store.string());
    c.out = path_of(c.out.string());
    std::optional<SweepSpec> preset;
    std::optional<double> start, stop, step;

    const std::map<std::string, std::function<void(std::string_view)>> setters{
        {"datasets_dir", [&](auto v) { c.datasets_dir = path_of(v); }},
        {"datasets", [&](auto v) { c.datasets = split_list(v); }},
        {"header", [&](auto v) { c.header = parse_bool(v); }},
        {"label_column", [&](auto v) {
             parse_label_column(v);
             c.label_column = std::string(v);
         }},
        {"methods", [&](auto v) { c.methods = split_list(v); }},
        {"external_timeout", [&](auto v) { c.external_timeout = parse_number(v); }},
        {"sweep", [&](auto v) { preset = sweep_preset(std::string(v)); }},
        {"sweep_start", [&](auto v) { start = parse_number(v); }},
        {"sweep_stop", [&](auto v) { stop = parse_number(v); }},
        {"sweep_step", [&](auto v) { step = parse_number(v); }},
        {"repetitions", [&](auto v) { c.repetitions = parse_unsigned<std::size_t>(v); }},
        {"cv_folds", [&](auto v) { c.cv_folds = parse_unsigned<int>(v); }},
        {"kmeans_runs", [&](auto v) { c.kmeans_runs = parse_unsigned<std::size_t>(v); }},
        {"forest_trees", [&](auto v) { c.forest_trees = parse_unsigned<std::size_t>(v); }},
        {"alpha", [&](auto v) { c.alpha = parse_number(v); }},
        {"seed", [&](auto v) { c.seed = parse_unsigned<std::uint64_t>(v); }},
        {"threads", [&](auto v) { c.threads = parse_unsigned<std::size_t>(v); }},
        {"record_timings", [&](auto v) { c.record_timings = parse_bool(v); }},
        {"standardize", [&](auto v) { c.standardize = parse_bool(v); }},
        {"append", [&](auto v) { c.append = parse_bool(v); }},
        {"k_neighbors", [&](auto v) { c.k_neighbors = parse_unsigned<std::size_t>(v); }},
        {"mcfs_eigen", [&](auto v) { c.mcfs_eigen = parse_unsigned<std::size_t>(v); }},
        {"mcfs_l1_ratio", [&](auto v) { c.mcfs_l1_ratio = parse_number(v); }},
        {"store", [&](auto v) { c.store = path_of(v); }},
        {"runtime_store", [&](auto v) { c.runtime_store = path_of(v); }},
        {"out", [&](auto v) { c.out = path_of(v); }},
        {"runtime_methods", [&](auto v) { c.runtime_methods = split_list(v); }},
        {"runtime_dimension", [&](auto v) { c.runtime.dimension = parse_dimension(std::string(v)); }},
        {"runtime_fixed", [&](auto v) { c.runtime.fixed = parse_unsigned<std::size_t>(v); }},
        {"runtime_start", [&](auto v) { c.runtime.start = parse_unsigned<std::size_t>(v); }},
        {"runtime_stop", [&](auto v) { c.runtime.stop = parse_unsigned<std::size_t>(v); }},
        {"runtime_step", [&](auto v) { c.runtime.step = parse_unsigned<std::size_t>(v); }},
        {"runtime_cap", [&](auto v) { c.runtime.cap = std::chrono::duration<double>(parse_number(v)); }},
        {"runtime_classes", [&](auto v) { c.runtime_classes = parse_unsigned<std::size_t>(v); }},
        {"runtime_informative", [&](auto v) { c.runtime_informative = parse_unsigned<std::size_t>(v); }},
        {"runtime_isolation", [&](auto v) {
             if (v == "fork") {
                 c.runtime_isolation = Isolation::fork;
             } else if (v == "inline") {
                 c.runtime_isolation = Isolation::inline_;
             } else {
                 throw InvalidArgument("expected fork or inline");
             }
         }},
    };

    std::map<std::string, std::size_t> seen;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const std::size_t end = std::min(text.find('\n', pos), text.size());
        const std::string_view line = trim(text.substr(pos, end - pos));
        pos = end + 1;
        ++line_no;
        if (line.empty() || line.front() == '#') continue;
        const std::size_t eq = line.find('=');
        if (eq == std::string_view::npos) throw ParseError("expected 'key = value'", line_no);
        const std::string key(trim(line.substr(0, eq)));
        const std::string_view value = trim(line.substr(eq + 1));
        if (key.empty()) throw ParseError("missing key", line_no);
        if (const auto it = seen.find(key); it != seen.end()) {
            throw ParseError("duplicate key '" + key + "' (first set on line " + std::to_string(it->second) + ")",
                             line_no);
        }
        seen[key] = line_no;
        try {
            if (key.rfind("external.", 0) == 0) {
                const std::string name = key.substr(9);
                if (name.empty()) throw InvalidArgument("external selector needs a name");
                if (value.empty()) throw InvalidArgument("external selector needs a command");
                c.external[name] = std::string(value);
                continue;
            }
            const auto setter = setters.find(key);
            if (setter == setters.end()) throw ParseError("unknown key '" + key + "'", line_no);
            setter->second(value);
        } catch (const ParseError&) {
            throw;
        } catch (const Error& e) {
            throw ParseError(key + ": " + e.what(), line_no);
        }
    }

    SweepSpec s = preset.value_or(SweepSpec::full());
    if (start) s.start = *start;
    if (stop) s.stop = *stop;
    if (step) s.step = *step;
    s.validate();
    c.sweep = s;
    require(c.cv_folds >= 2, "cv_folds must be at least 2");
    require(c.repetitions >= 1, "repetitions must be at least 1");
    require(c.kmeans_runs >= 1, "kmeans_runs must be at least 1");
    require(c.forest_trees >= 1, "forest_trees must be at least 1");
    require(c.alpha > 0.0 && c.alpha < 1.0, "alpha must be in (0, 1)");
    require(c.threads >= 1, "threads must be at least 1");
    require(c.external_timeout > 0.0, "external_timeout must be positive");
    c.runtime.values();
    return c;
}

inline BenchConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InvalidArgument("cannot open config " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    try {
        return parse_config(buf.str(), path.has_parent_path() ? path.parent_path() : std::filesystem::path("."));
    } catch (const ParseError& e) {
        throw ParseError(path.string() + ": " + e.message(), e.line(), e.column());
    }
}

}  // namespace fsbench

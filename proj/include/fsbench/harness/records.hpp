#pragma once

// Line-delimited JSON record store. Line 1 is a header naming the schema,
// its version and the record kind; every following line is one record.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "fsbench/error.hpp"

namespace fsbench {

enum class Metric { acc, auc, clsacc, nmi };

inline constexpr Metric all_metrics[] = {Metric::acc, Metric::auc, Metric::clsacc, Metric::nmi};

inline std::string metric_name(Metric m) {
    switch (m) {
        case Metric::acc: return "ACC";
        case Metric::auc: return "AUC";
        case Metric::clsacc: return "CLSACC";
        case Metric::nmi: return "NMI";
    }
    return "?";
}

inline Metric parse_metric(const std::string& text) {
    for (Metric m : all_metrics) {
        if (metric_name(m) == text) return m;
    }
    throw InvalidArgument("unknown metric '" + text + "' (expected ACC, AUC, CLSACC or NMI)");
}

struct EvalRecord {
    std::string dataset;
    std::string method;
    std::size_t repetition = 0;
    double fraction = 0.0;
    std::size_t k = 0;
    Metric metric = Metric::acc;
    double value = 0.0;
    double selector_ms = 0.0;
    double eval_ms = 0.0;
    std::uint64_t seed = 0;
    bool ok = true;
    std::string error;

    bool operator==(const EvalRecord&) const = default;
};

enum class RuntimeDimension { instances, features };

inline std::string dimension_name(RuntimeDimension d) { return d == RuntimeDimension::instances ? "instances" : "features"; }

inline RuntimeDimension parse_dimension(const std::string& text) {
    if (text == "instances") return RuntimeDimension::instances;
    if (text == "features") return RuntimeDimension::features;
    throw InvalidArgument("unknown runtime dimension '" + text + "' (expected instances or features)");
}

struct RuntimeRecord {
    std::string method;
    RuntimeDimension dimension = RuntimeDimension::features;
    std::size_t instances = 0;
    std::size_t features = 0;
    double seconds = 0.0;
    bool over_cap = false;
    std::uint64_t seed = 0;
    bool ok = true;
    std::string error;

    std::size_t grid_value() const { return dimension == RuntimeDimension::instances ? instances : features; }
    bool operator==(const RuntimeRecord&) const = default;
};

enum class StoreKind { eval, runtime };

inline constexpr const char* store_schema = "fsbench.records";
inline constexpr int store_version = 1;

namespace detail {

using ordered_json = nlohmann::ordered_json;

inline std::string kind_name(StoreKind k) { return k == StoreKind::eval ? "eval" : "runtime"; }

inline std::string header_line(StoreKind kind) {
    ordered_json h;
    h["schema"] = store_schema;
    h["version"] = store_version;
    h["kind"] = kind_name(kind);
    return h.dump();
}

inline ordered_json to_json(const EvalRecord& r) {
    ordered_json j;
    j["dataset"] = r.dataset;
    j["method"] = r.method;
    j["repetition"] = r.repetition;
    j["fraction"] = r.fraction;
    j["k"] = r.k;
    j["metric"] = metric_name(r.metric);
    j["value"] = r.value;
    j["selector_ms"] = r.selector_ms;
    j["eval_ms"] = r.eval_ms;
    j["seed"] = r.seed;
    j["status"] = r.ok ? "ok" : "failed";
    j["error"] = r.error;
    return j;
}

inline ordered_json to_json(const RuntimeRecord& r) {
    ordered_json j;
    j["method"] = r.method;
    j["dimension"] = dimension_name(r.dimension);
    j["instances"] = r.instances;
    j["features"] = r.features;
    j["seconds"] = r.seconds;
    j["over_cap"] = r.over_cap;
    j["seed"] = r.seed;
    j["status"] = r.ok ? "ok" : "failed";
    j["error"] = r.error;
    return j;
}

/// Field access that reports the offending line.
class Fields {
public:
    Fields(const nlohmann::json& j, std::size_t line, const std::set<std::string>& expected) : j_(j), line_(line) {
        if (!j.is_object()) throw ParseError("record is not a JSON object", line);
        for (const auto& [key, _] : j.items()) {
            if (!expected.count(key)) throw ParseError("unknown field '" + key + "'", line);
        }
        for (const auto& key : expected) {
            if (!j.contains(key)) throw ParseError("missing field '" + key + "'", line);
        }
    }

    std::string string(const char* key) const {
        const auto& v = j_.at(key);
        if (!v.is_string()) fail(key, "a string");
        return v.get<std::string>();
    }
    std::uint64_t unsigned_int(const char* key) const {
        const auto& v = j_.at(key);
        if (!v.is_number_unsigned()) fail(key, "a non-negative integer");
        return v.get<std::uint64_t>();
    }
    double real(const char* key) const {
        const auto& v = j_.at(key);
        if (!v.is_number()) fail(key, "a number");
        return v.get<double>();
    }
    bool boolean(const char* key) const {
        const auto& v = j_.at(key);
        if (!v.is_boolean()) fail(key, "a boolean");
        return v.get<bool>();
    }
    bool status() const {
        const std::string s = string("status");
        if (s != "ok" && s != "failed") throw ParseError("status must be 'ok' or 'failed'", line_);
        return s == "ok";
    }
    std::size_t line() const { return line_; }

private:
    [[noreturn]] void fail(const char* key, const char* what) const {
        throw ParseError(std::string("field '") + key + "' must be " + what, line_);
    }

    const nlohmann::json& j_;
    std::size_t line_;
};

inline EvalRecord eval_from_json(const nlohmann::json& j, std::size_t line) {
    static const std::set<std::string> keys{"dataset", "method",  "repetition", "fraction", "k",      "metric",
                                            "value",   "selector_ms", "eval_ms", "seed",    "status", "error"};
    const Fields f(j, line, keys);
    EvalRecord r;
    r.dataset = f.string("dataset");
    r.method = f.string("method");
    r.repetition = f.unsigned_int("repetition");
    r.fraction = f.real("fraction");
    r.k = f.unsigned_int("k");
    try {
        r.metric = parse_metric(f.string("metric"));
    } catch (const InvalidArgument& e) {
        throw ParseError(e.what(), line);
    }
    r.value = f.real("value");
    r.selector_ms = f.real("selector_ms");
    r.eval_ms = f.real("eval_ms");
    r.seed = f.unsigned_int("seed");
    r.ok = f.status();
    r.error = f.string("error");
    if (!(r.fraction > 0.0 && r.fraction <= 1.0)) throw ParseError("fraction outside (0, 1]", line);
    if (r.k < 1) throw ParseError("k must be at least 1", line);
    if (r.ok && !(r.value >= 0.0 && r.value <= 1.0)) throw ParseError("metric value outside [0, 1]", line);
    return r;
}

inline RuntimeRecord runtime_from_json(const nlohmann::json& j, std::size_t line) {
    static const std::set<std::string> keys{"method", "dimension", "instances", "features", "seconds",
                                            "over_cap", "seed", "status", "error"};
    const Fields f(j, line, keys);
    RuntimeRecord r;
    r.method = f.string("method");
    try {
        r.dimension = parse_dimension(f.string("dimension"));
    } catch (const InvalidArgument& e) {
        throw ParseError(e.what(), line);
    }
    r.instances = f.unsigned_int("instances");
    r.features = f.unsigned_int("features");
    r.seconds = f.real("seconds");
    r.over_cap = f.boolean("over_cap");
    r.seed = f.unsigned_int("seed");
    r.ok = f.status();
    r.error = f.string("error");
    if (r.seconds < 0.0) throw ParseError("seconds must be non-negative", line);
    return r;
}

inline StoreKind parse_header(const std::string& text) {
    nlohmann::json h;
    try {
        h = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error&) {
        throw ParseError("store header is not valid JSON", 1);
    }
    if (!h.is_object() || h.size() != 3 || !h.contains("schema") || !h.contains("version") || !h.contains("kind")) {
        throw ParseError("store header must have exactly schema, version and kind", 1);
    }
    if (h["schema"] != store_schema) throw ParseError("unknown store schema", 1);
    if (!h["version"].is_number_integer() || h["version"].get<int>() != store_version) {
        throw ParseError("unsupported store version " + h["version"].dump(), 1);
    }
    if (h["kind"] == "eval") return StoreKind::eval;
    if (h["kind"] == "runtime") return StoreKind::runtime;
    throw ParseError("unknown store kind " + h["kind"].dump(), 1);
}

}  // namespace detail

struct RecordStore {
    StoreKind kind = StoreKind::eval;
    bool empty_file = false;  // zero bytes, no header yet
    std::vector<EvalRecord> eval;
    std::vector<RuntimeRecord> runtime;
};

inline RecordStore parse_store(std::string_view text) {
    RecordStore store;
    if (text.empty()) {
        store.empty_file = true;
        return store;
    }
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos < text.size()) {
        ++line_no;
        const std::size_t end = text.find('\n', pos);
        if (end == std::string_view::npos) throw ParseError("truncated record (no line terminator)", line_no);
        const std::string line(text.substr(pos, end - pos));
        pos = end + 1;
        if (line_no == 1) {
            store.kind = detail::parse_header(line);
            continue;
        }
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(line);
        } catch (const nlohmann::json::parse_error&) {
            throw ParseError("malformed record", line_no);
        }
        if (store.kind == StoreKind::eval) {
            store.eval.push_back(detail::eval_from_json(j, line_no));
        } else {
            store.runtime.push_back(detail::runtime_from_json(j, line_no));
        }
    }
    return store;
}

inline RecordStore load_store(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InvalidArgument("cannot open record store " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    try {
        return parse_store(buf.str());
    } catch (const ParseError& e) {
        throw ParseError(path.string() + ": " + e.message(), e.line(), e.column());
    }
}

inline std::vector<EvalRecord> load_eval_records(const std::filesystem::path& path) {
    RecordStore s = load_store(path);
    if (!s.empty_file && s.kind != StoreKind::eval) throw InvalidArgument(path.string() + " holds runtime records");
    return std::move(s.eval);
}

inline std::vector<RuntimeRecord> load_runtime_records(const std::filesystem::path& path) {
    RecordStore s = load_store(path);
    if (!s.empty_file && s.kind != StoreKind::runtime) throw InvalidArgument(path.string() + " holds sweep records");
    return std::move(s.runtime);
}

/// Single-writer append channel. Appending to an existing store checks that
/// its header matches first.
class RecordWriter {
public:
    RecordWriter(const std::filesystem::path& path, StoreKind kind, bool append) : path_(path), kind_(kind) {
        bool need_header = true;
        if (append && std::filesystem::exists(path) && std::filesystem::file_size(path) > 0) {
            const RecordStore existing = load_store(path);
            if (existing.kind != kind) throw InvalidArgument(path.string() + " holds a different record kind");
            need_header = false;
        }
        if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
        out_.open(path, std::ios::binary | (append ? std::ios::app : std::ios::trunc));
        if (!out_) throw InvalidArgument("cannot write record store " + path.string());
        if (need_header) out_ << detail::header_line(kind) << '\n';
        out_.flush();
    }

    void write(const EvalRecord& r) {
        require(kind_ == StoreKind::eval, "record store kind mismatch");
        out_ << detail::to_json(r).dump() << '\n';
        check();
    }

    void write(const RuntimeRecord& r) {
        require(kind_ == StoreKind::runtime, "record store kind mismatch");
        out_ << detail::to_json(r).dump() << '\n';
        check();
    }

    void flush() { out_.flush(); }

private:
    void check() {
        if (!out_) throw Error("write to " + path_.string() + " failed");
    }

    std::filesystem::path path_;
    StoreKind kind_;
    std::ofstream out_;
};

}  // namespace fsbench

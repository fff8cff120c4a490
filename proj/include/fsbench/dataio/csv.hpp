#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <variant>
#include <vector>

#include "fsbench/dataio/dataset.hpp"
#include "fsbench/error.hpp"

namespace fsbench {

struct LastColumn {
    bool operator==(const LastColumn&) const = default;
};

/// Which column carries class labels: the last one, a 0-based index, or a
/// header name.
using LabelColumn = std::variant<LastColumn, std::size_t, std::string>;

struct CsvOptions {
    bool header = false;
    std::optional<LabelColumn> label_column;  // none: every column is a feature
};

/// "none" -> no labels, "last" -> last column, digits -> index, else a name.
inline std::optional<LabelColumn> parse_label_column(std::string_view text) {
    if (text == "none" || text.empty()) return std::nullopt;
    if (text == "last") return LabelColumn{LastColumn{}};
    std::size_t index = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), index);
    if (ec == std::errc{} && ptr == text.data() + text.size()) return LabelColumn{index};
    return LabelColumn{std::string(text)};
}

namespace detail {

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    if (s.size() >= 2 && s.front() == '"' && s.back() == '"') s = s.substr(1, s.size() - 2);
    return s;
}

inline std::vector<std::string_view> split_fields(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = line.find(',', start);
        if (comma == std::string_view::npos) {
            out.push_back(trim(line.substr(start)));
            break;
        }
        out.push_back(trim(line.substr(start, comma - start)));
        start = comma + 1;
    }
    return out;
}

inline std::optional<double> parse_real(std::string_view s) {
    if (!s.empty() && s.front() == '+') s.remove_prefix(1);
    if (s.empty()) return std::nullopt;
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
    return v;
}

inline std::optional<long long> parse_integer(std::string_view s) {
    if (!s.empty() && s.front() == '+') s.remove_prefix(1);
    long long v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
    return v;
}

inline std::string format_real(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

}  // namespace detail

/// Parses CSV text. Labels are remapped to {0..c-1} in ascending order of
/// their original value (numeric order when every label is an integer).
inline Dataset parse_csv(std::string_view text, const CsvOptions& options, std::string name = "dataset") {
    std::vector<std::pair<std::size_t, std::string_view>> lines;  // (1-based line, content)
    {
        std::size_t start = 0, number = 1;
        while (start <= text.size()) {
            std::size_t nl = text.find('\n', start);
            if (nl == std::string_view::npos) nl = text.size();
            std::string_view line = text.substr(start, nl - start);
            if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
            if (!detail::trim(line).empty()) lines.emplace_back(number, line);
            start = nl + 1;
            ++number;
        }
    }
    if (options.header && lines.empty()) throw ParseError("CSV has no header row", 1);

    std::vector<std::string> header;
    std::size_t first_data = 0;
    if (options.header) {
        for (auto f : detail::split_fields(lines.front().second)) header.emplace_back(f);
        first_data = 1;
    }
    if (lines.size() <= first_data) throw ParseError("CSV has no data rows", 0);

    const std::size_t columns = options.header ? header.size()
                                               : detail::split_fields(lines[first_data].second).size();
    std::optional<std::size_t> label_index;
    if (options.label_column) {
        label_index = std::visit(
            [&](const auto& sel) -> std::size_t {
                using T = std::decay_t<decltype(sel)>;
                if constexpr (std::is_same_v<T, LastColumn>) {
                    return columns - 1;
                } else if constexpr (std::is_same_v<T, std::size_t>) {
                    if (sel >= columns)
                        throw InvalidArgument("label column index " + std::to_string(sel) + " out of range");
                    return sel;
                } else {
                    auto it = std::find(header.begin(), header.end(), sel);
                    if (it == header.end())
                        throw InvalidArgument("label column '" + sel + "' not found in header");
                    return static_cast<std::size_t>(it - header.begin());
                }
            },
            *options.label_column);
    }
    const std::size_t d = columns - (label_index ? 1 : 0);
    const std::size_t n = lines.size() - first_data;
    if (d == 0) throw ParseError("CSV has no feature columns", lines[first_data].first);

    Dataset ds;
    ds.name = std::move(name);
    ds.X.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
    std::vector<std::string> raw_labels;
    for (std::size_t c = 0; c < columns; ++c) {
        if (label_index && c == *label_index) continue;
        ds.feature_names.push_back(options.header ? header[c] : "f" + std::to_string(ds.feature_names.size()));
    }

    for (std::size_t r = 0; r < n; ++r) {
        const auto& [line_no, line] = lines[first_data + r];
        const auto fields = detail::split_fields(line);
        if (fields.size() != columns) {
            throw ParseError("ragged row: expected " + std::to_string(columns) + " fields, found " +
                                 std::to_string(fields.size()),
                             line_no);
        }
        Eigen::Index feature = 0;
        for (std::size_t c = 0; c < columns; ++c) {
            if (label_index && c == *label_index) {
                if (fields[c].empty()) throw ParseError("empty label cell", line_no, c + 1);
                raw_labels.emplace_back(fields[c]);
                continue;
            }
            const auto v = detail::parse_real(fields[c]);
            if (!v) throw ParseError("cannot parse '" + std::string(fields[c]) + "' as a real", line_no, c + 1);
            if (!std::isfinite(*v))
                throw ParseError("non-finite value '" + std::string(fields[c]) + "'", line_no, c + 1);
            ds.X(static_cast<Eigen::Index>(r), feature++) = *v;
        }
    }

    if (label_index) {
        bool numeric = std::all_of(raw_labels.begin(), raw_labels.end(),
                                   [](const std::string& s) { return detail::parse_integer(s).has_value(); });
        Labels y(n);
        if (numeric) {
            std::map<long long, int> ids;
            for (const auto& s : raw_labels) ids.emplace(*detail::parse_integer(s), 0);
            int next = 0;
            for (auto& [value, id] : ids) {
                id = next++;
                ds.class_names.push_back(std::to_string(value));
            }
            for (std::size_t i = 0; i < n; ++i) y[i] = ids.at(*detail::parse_integer(raw_labels[i]));
        } else {
            std::map<std::string, int> ids;
            for (const auto& s : raw_labels) ids.emplace(s, 0);
            int next = 0;
            for (auto& [value, id] : ids) {
                id = next++;
                ds.class_names.push_back(value);
            }
            for (std::size_t i = 0; i < n; ++i) y[i] = ids.at(raw_labels[i]);
        }
        ds.y = std::move(y);
    }
    validate(ds);
    return ds;
}

inline Dataset load_csv(const std::filesystem::path& path, const CsvOptions& options) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InvalidArgument("cannot open dataset file '" + path.string() + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_csv(buf.str(), options, path.stem().string());
}

struct CsvWriteOptions {
    bool header = false;
    bool labels = true;  // appended as the last column when present
};

/// Shortest round-trip formatting; reloading reproduces X exactly.
inline void write_csv(std::ostream& out, const Dataset& ds, const CsvWriteOptions& options = {}) {
    const bool with_labels = options.labels && ds.y.has_value();
    if (options.header) {
        for (std::size_t j = 0; j < ds.feature_count(); ++j) {
            if (j) out << ',';
            out << (j < ds.feature_names.size() ? ds.feature_names[j] : "f" + std::to_string(j));
        }
        if (with_labels) out << ",label";
        out << '\n';
    }
    for (Eigen::Index i = 0; i < ds.X.rows(); ++i) {
        for (Eigen::Index j = 0; j < ds.X.cols(); ++j) {
            if (j) out << ',';
            out << detail::format_real(ds.X(i, j));
        }
        if (with_labels) out << ',' << (*ds.y)[static_cast<std::size_t>(i)];
        out << '\n';
    }
}

inline void write_csv(const std::filesystem::path& path, const Dataset& ds, const CsvWriteOptions& options = {}) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw InvalidArgument("cannot write '" + path.string() + "'");
    write_csv(out, ds, options);
    if (!out) throw Error("write failed for '" + path.string() + "'");
}

}  // namespace fsbench

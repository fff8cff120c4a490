#pragma once

#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <string>
#include <vector>

#include <unistd.h>

#include "fsbench/dataio/csv.hpp"
#include "fsbench/error.hpp"
#include "fsbench/process.hpp"
#include "fsbench/selectors/ranking.hpp"

namespace fsbench {

namespace detail {

/// Temporary file removed on scope exit.
class TempFile {
public:
    TempFile() {
        std::string pattern = (std::filesystem::temp_directory_path() / "fsbench-XXXXXX.csv").string();
        const int fd = ::mkstemps(pattern.data(), 4);
        if (fd < 0) throw ExternalError(ExternalError::Kind::launch, "cannot create temporary file");
        ::close(fd);
        path_ = pattern;
    }
    ~TempFile() {
        std::error_code ec;
        std::filesystem::remove(path_, ec);
    }
    TempFile(const TempFile&) = delete;
    TempFile& operator=(const TempFile&) = delete;

    const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
};

}  // namespace detail

/// Parses the plugin's stdout: exactly `d` finite reals separated by ASCII
/// whitespace.
inline std::vector<double> parse_external_scores(std::string_view text, std::size_t d) {
    std::vector<double> scores;
    std::size_t pos = 0;
    auto is_space = [](char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' || c == '\f'; };
    while (pos < text.size()) {
        while (pos < text.size() && is_space(text[pos])) ++pos;
        if (pos == text.size()) break;
        std::size_t end = pos;
        while (end < text.size() && !is_space(text[end])) ++end;
        const auto token = text.substr(pos, end - pos);
        const auto value = detail::parse_real(token);
        if (!value || !std::isfinite(*value)) {
            throw ExternalError(ExternalError::Kind::malformed_output,
                                "external selector printed a non-numeric score '" + std::string(token) + "'");
        }
        scores.push_back(*value);
        pos = end;
    }
    if (scores.size() != d) {
        throw ExternalError(ExternalError::Kind::wrong_count, "external selector printed " +
                                                                  std::to_string(scores.size()) + " scores, expected " +
                                                                  std::to_string(d));
    }
    return scores;
}

/// Writes the features (no header, no labels) to a temporary CSV and runs
/// `<command> <csv-path>`.
inline FeatureRanking external_ranking(const Dataset& ds, const std::string& command,
                                       std::chrono::duration<double> timeout, std::string method = "external") {
    detail::TempFile file;
    write_csv(file.path(), ds, CsvWriteOptions{.header = false, .labels = false});
    const ProcessResult run = run_command(command, file.path().string(), timeout);
    if (run.timed_out) {
        throw ExternalError(ExternalError::Kind::timeout,
                            method + ": timed out after " + std::to_string(timeout.count()) + " s");
    }
    if (run.exit_code != 0) {
        throw ExternalError(ExternalError::Kind::exit_status,
                            method + ": command exited with status " + std::to_string(run.exit_code));
    }
    return make_ranking(parse_external_scores(run.output, ds.feature_count()), std::move(method));
}

}  // namespace fsbench

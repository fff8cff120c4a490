#pragma once

#include <cstdint>
#include <string>

#include "fsbench/dataio/dataset.hpp"
#include "fsbench/error.hpp"
#include "fsbench/random.hpp"

namespace fsbench {

struct BlobOptions {
    double separation = 6.0;  // distance between consecutive cluster centres, per informative feature
    double noise = 1.0;       // within-cluster standard deviation
};

/// c Gaussian clusters. Cluster j is centred at j * separation on each of the
/// first `informative` features; the remaining features are pure noise.
/// Instance i belongs to cluster i % c, so cluster sizes differ by at most 1.
inline Dataset synth_blobs(std::size_t n, std::size_t d, std::size_t c, std::size_t informative,
                           std::uint64_t seed, const BlobOptions& options = {}) {
    require(n >= 2, "synth_blobs: n must be at least 2");
    require(d >= 1, "synth_blobs: d must be at least 1");
    require(c >= 1, "synth_blobs: c must be at least 1");
    require(c <= n, "synth_blobs: more clusters than instances");
    require(informative <= d, "synth_blobs: informative must not exceed d");
    require(options.noise > 0.0, "synth_blobs: noise must be positive");

    Rng rng(seed);
    Dataset ds;
    ds.name = "blobs_n" + std::to_string(n) + "_d" + std::to_string(d) + "_c" + std::to_string(c);
    ds.X.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
    Labels y(n);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t cluster = i % c;
        y[i] = static_cast<int>(cluster);
        for (std::size_t j = 0; j < d; ++j) {
            const double centre = j < informative ? options.separation * static_cast<double>(cluster) : 0.0;
            ds.X(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = centre + options.noise * rng.normal();
        }
    }
    ds.y = std::move(y);
    for (std::size_t j = 0; j < d; ++j) ds.feature_names.push_back("f" + std::to_string(j));
    for (std::size_t k = 0; k < c; ++k) ds.class_names.push_back(std::to_string(k));
    return ds;
}

}  // namespace fsbench

#pragma once

// Platform-stable random streams. The standard distributions are
// implementation-defined, so every draw that ends up in a record goes
// through the helpers below on top of std::mt19937_64.

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <span>
#include <type_traits>
#include <string_view>
#include <utility>

namespace fsbench {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t fnv1a(std::string_view text) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

/// Child seed derived from a parent seed and a tuple of tags. Only depends
/// on the values, never on call order.
template <typename... Tags>
std::uint64_t derive_seed(std::uint64_t parent, const Tags&... tags) {
    std::uint64_t h = splitmix64(parent);
    auto mix = [&h](std::uint64_t v) { h = splitmix64(h ^ v); };
    auto one = [&mix](const auto& tag) {
        if constexpr (std::is_convertible_v<decltype(tag), std::string_view>) {
            mix(fnv1a(std::string_view(tag)));
        } else {
            mix(static_cast<std::uint64_t>(tag));
        }
    };
    (one(tags), ...);
    return h;
}

class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    /// Uniform on [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    /// Uniform integer on [0, n), n > 0. Rejection sampling, no modulo bias.
    std::uint64_t index(std::uint64_t n) {
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        std::uint64_t v;
        do {
            v = engine_();
        } while (v >= limit);
        return v % n;
    }

    /// Standard normal via Box-Muller.
    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u1;
        do {
            u1 = uniform();
        } while (u1 <= 0.0);
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double theta = 2.0 * std::numbers::pi * u2;
        spare_ = r * std::sin(theta);
        has_spare_ = true;
        return r * std::cos(theta);
    }

    /// Fisher-Yates.
    template <typename T>
    void shuffle(std::span<T> items) {
        for (std::size_t i = items.size(); i > 1; --i) {
            std::swap(items[i - 1], items[index(i)]);
        }
    }

private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace fsbench

#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <vector>

#include "fsbench/error.hpp"
#include "fsbench/random.hpp"

namespace fsbench {

/// fold[i] is the test fold of instance i.
struct FoldPlan {
    std::vector<int> fold;
    int folds = 0;

    std::vector<std::size_t> test_indices(int f) const {
        std::vector<std::size_t> out;
        for (std::size_t i = 0; i < fold.size(); ++i) {
            if (fold[i] == f) out.push_back(i);
        }
        return out;
    }

    std::vector<std::size_t> train_indices(int f) const {
        std::vector<std::size_t> out;
        for (std::size_t i = 0; i < fold.size(); ++i) {
            if (fold[i] != f) out.push_back(i);
        }
        return out;
    }
};

/// Per class, a seeded shuffle dealt round-robin over the folds. The dealing
/// position carries over between classes so fold sizes stay balanced.
inline FoldPlan stratified_folds(std::span<const int> y, int folds, std::uint64_t seed) {
    require(folds >= 2, "stratified_folds: cross-validation needs at least 2 folds");
    std::map<int, std::vector<std::size_t>> members;
    for (std::size_t i = 0; i < y.size(); ++i) members[y[i]].push_back(i);
    for (const auto& [label, idx] : members) {
        if (idx.size() < static_cast<std::size_t>(folds)) {
            throw InvalidArgument("stratified_folds: class " + std::to_string(label) + " has " +
                                  std::to_string(idx.size()) + " members, fewer than " + std::to_string(folds) +
                                  " folds");
        }
    }
    Rng rng(seed);
    FoldPlan plan{std::vector<int>(y.size(), -1), folds};
    std::size_t position = 0;
    for (auto& [label, idx] : members) {
        rng.shuffle(std::span<std::size_t>(idx));
        for (std::size_t i : idx) {
            plan.fold[i] = static_cast<int>(position % static_cast<std::size_t>(folds));
            ++position;
        }
    }
    return plan;
}

}  // namespace fsbench

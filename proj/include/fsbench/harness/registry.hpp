#pragma once

#include <chrono>
#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "fsbench/dataio/dataset.hpp"
#include "fsbench/error.hpp"
#include "fsbench/random.hpp"
#include "fsbench/selectors/external.hpp"
#include "fsbench/selectors/laplacian.hpp"
#include "fsbench/selectors/mcfs.hpp"
#include "fsbench/selectors/ranking.hpp"

namespace fsbench {

/// `seed` is only consumed by stochastic selectors.
using SelectorFn = std::function<FeatureRanking(const Dataset&, std::uint64_t seed)>;

struct Selector {
    std::string name;
    bool stochastic = false;  // evaluated once per repetition instead of once
    SelectorFn rank;
};

struct SelectorParams {
    GraphParams graph;
    McfsParams mcfs;
    std::chrono::duration<double> external_timeout{3600.0};
};

class SelectorRegistry {
public:
    void add(Selector s) {
        require(!s.name.empty(), "selector name must not be empty");
        require(static_cast<bool>(s.rank), "selector '" + s.name + "' has no rank function");
        auto name = s.name;
        selectors_.insert_or_assign(std::move(name), std::move(s));
    }

    void add_external(const std::string& name, const std::string& command, std::chrono::duration<double> timeout) {
        require(!command.empty(), "external selector '" + name + "' has an empty command");
        add({name, false, [name, command, timeout](const Dataset& ds, std::uint64_t) {
                 return external_ranking(ds, command, timeout, name);
             }});
    }

    bool contains(const std::string& name) const { return selectors_.count(name) != 0; }

    const Selector& get(const std::string& name) const {
        const auto it = selectors_.find(name);
        if (it == selectors_.end()) throw InvalidArgument("unknown method '" + name + "'");
        return it->second;
    }

    std::vector<std::string> names() const {
        std::vector<std::string> out;
        for (const auto& [name, _] : selectors_) out.push_back(name);
        return out;
    }

    /// Throws on the first unknown name.
    void check(const std::vector<std::string>& methods) const {
        require(!methods.empty(), "no methods configured");
        for (const auto& m : methods) get(m);
    }

    static SelectorRegistry builtin(const SelectorParams& params = {}) {
        SelectorRegistry r;
        r.add({"random", true, [](const Dataset& ds, std::uint64_t seed) { return random_ranking(ds.feature_count(), seed); }});
        r.add({"variance", false, [](const Dataset& ds, std::uint64_t) { return variance_ranking(ds); }});
        r.add({"correlation", false, [](const Dataset& ds, std::uint64_t) { return correlation_ranking(ds); }});
        r.add({"laplacian", false,
               [g = params.graph](const Dataset& ds, std::uint64_t) { return laplacian_score_ranking(ds, g); }});
        r.add({"mcfs", false, [p = params.mcfs](const Dataset& ds, std::uint64_t) { return mcfs_ranking(ds, p); }});
        return r;
    }

private:
    std::map<std::string, Selector> selectors_;
};

}  // namespace fsbench

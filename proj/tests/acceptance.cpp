// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "fsbench/dataio/synth.hpp"
#include "fsbench/downstream/hungarian.hpp"
#include "fsbench/downstream/kmeans.hpp"
#include "fsbench/downstream/metrics.hpp"
#include "fsbench/harness/runtime.hpp"
#include "fsbench/harness/sweep.hpp"
#include "fsbench/report/commands.hpp"
#include "fsbench/selectors/laplacian.hpp"
#include "fsbench/selectors/ranking.hpp"
#include "fsbench/stats/curve.hpp"
#include "fsbench/stats/significance.hpp"

using namespace fsbench;
namespace fs = std::filesystem;
using clock_type = std::chrono::steady_clock;

namespace {

struct Failure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

void check(bool ok, const std::string& what) {
    if (!ok) throw Failure(what);
}

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

double seconds_since(clock_type::time_point t0) {
    return std::chrono::duration<double>(clock_type::now() - t0).count();
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

std::vector<std::vector<std::string>> csv_rows(const std::string& text) {
    std::vector<std::vector<std::string>> rows;
    std::istringstream in(text);
    std::string line;
    std::getline(in, line);  // header
    while (std::getline(in, line)) {
        std::vector<std::string> f;
        std::string cell;
        std::istringstream ls(line);
        while (std::getline(ls, cell, ',')) f.push_back(cell);
        rows.push_back(f);
    }
    return rows;
}

// ---- 1 --------------------------------------------------------------------

std::string hungarian_oracle() {
    std::mt19937 gen(1);
    const auto t0 = clock_type::now();
    for (int t = 0; t < 200; ++t) {
        const int n = 2 + t % 6;
        Matrix cost(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) cost(i, j) = static_cast<double>(std::uniform_int_distribution<int>(-50, 99)(gen));
        std::vector<int> perm(static_cast<std::size_t>(n));
        std::iota(perm.begin(), perm.end(), 0);
        double best = std::numeric_limits<double>::infinity();
        do {
            double c = 0.0;
            for (int i = 0; i < n; ++i) c += cost(i, perm[static_cast<std::size_t>(i)]);
            best = std::min(best, c);
        } while (std::next_permutation(perm.begin(), perm.end()));
        const Assignment a = hungarian(cost);
        double from_map = 0.0;
        for (int i = 0; i < n; ++i) from_map += cost(i, static_cast<Eigen::Index>(a.row_to_col[static_cast<std::size_t>(i)]));
        check(a.cost == best && from_map == best, "matrix " + std::to_string(t) + ": cost differs from enumeration");
    }
    const double secs = seconds_since(t0);
    check(secs < 5.0, "took " + fmt("%.2f", secs) + " s");
    return "200 matrices exact, " + fmt("%.3f", secs) + " s";
}

// ---- 2 --------------------------------------------------------------------

double wilcoxon_enumeration(const std::vector<double>& d) {
    std::vector<double> nz;
    for (double v : d)
        if (v != 0.0) nz.push_back(v);
    const std::size_t m = nz.size();
    if (m == 0) return 1.0;
    std::vector<double> rank(m);
    for (std::size_t i = 0; i < m; ++i) {
        double below = 0, equal = 0;
        for (std::size_t j = 0; j < m; ++j) {
            below += std::abs(nz[j]) < std::abs(nz[i]);
            equal += std::abs(nz[j]) == std::abs(nz[i]);
        }
        rank[i] = below + (equal + 1.0) / 2.0;
    }
    double observed = 0.0;
    for (std::size_t i = 0; i < m; ++i)
        if (nz[i] > 0) observed += rank[i];
    std::uint64_t le = 0, ge = 0;
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << m); ++mask) {
        double w = 0.0;
        for (std::size_t i = 0; i < m; ++i)
            if (mask >> i & 1) w += rank[i];
        le += w <= observed + 1e-9;
        ge += w >= observed - 1e-9;
    }
    return std::min(1.0, 2.0 * static_cast<double>(std::min(le, ge)) / std::ldexp(1.0, static_cast<int>(m)));
}

std::string wilcoxon_exactness() {
    std::mt19937 gen(2);
    double worst = 0.0;
    for (int t = 0; t < 100; ++t) {
        const int n = std::uniform_int_distribution<int>(1, 14)(gen);
        std::vector<double> x(static_cast<std::size_t>(n)), y(static_cast<std::size_t>(n)), d;
        for (int i = 0; i < n; ++i) {
            // small integer grid: ties and zero differences both occur
            x[static_cast<std::size_t>(i)] = std::uniform_int_distribution<int>(0, 6)(gen);
            y[static_cast<std::size_t>(i)] = std::uniform_int_distribution<int>(0, 6)(gen);
        }
        std::size_t nonzero = 0;
        for (int i = 0; i < n; ++i) {
            d.push_back(x[static_cast<std::size_t>(i)] - y[static_cast<std::size_t>(i)]);
            nonzero += d.back() != 0.0;
        }
        if (nonzero > 12) {
            --t;
            continue;
        }
        const WilcoxonResult r = wilcoxon_signed_rank(x, y);
        const double oracle = wilcoxon_enumeration(d);
        worst = std::max(worst, std::abs(r.p_value - oracle));
        check(r.exact && std::abs(r.p_value - oracle) <= 1e-12, "sample " + std::to_string(t) + " differs");
    }
    const std::vector<double> a{1, 2, 3, 4, 5}, b{0, 0, 0, 0, 0};
    const double p = wilcoxon_signed_rank(a, b).p_value;
    check(p == 0.0625, "n=5 all-positive gave " + fmt("%.17g", p));
    return "100 samples, max |diff| " + fmt("%.1e", worst) + "; n=5 all-positive p = 0.0625";
}

// ---- 3 --------------------------------------------------------------------

std::vector<double> holm_oracle(const std::vector<double>& p) {
    const std::size_t m = p.size();
    std::vector<std::size_t> idx(m);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::stable_sort(idx.begin(), idx.end(), [&](auto a, auto b) { return p[a] < p[b]; });
    std::vector<double> out(m);
    for (std::size_t i = 0; i < m; ++i) {
        double v = 0.0;
        for (std::size_t j = 0; j <= i; ++j) v = std::max(v, static_cast<double>(m - j) * p[idx[j]]);
        out[idx[i]] = std::min(1.0, v);
    }
    return out;
}

std::string holm_correctness() {
    std::mt19937 gen(3);
    std::uniform_real_distribution<double> u(0.0, 0.2);
    for (int t = 0; t < 500; ++t) {
        const std::size_t m = 1 + static_cast<std::size_t>(t % 10);
        std::vector<double> p(m);
        for (auto& v : p) v = t % 3 == 0 ? std::round(u(gen) * 100) / 100 : u(gen);
        const auto adj = holm_adjust(p);
        check(adj == holm_oracle(p), "vector " + std::to_string(t) + " differs from step-down oracle");
        std::vector<std::size_t> idx(m);
        std::iota(idx.begin(), idx.end(), std::size_t{0});
        std::stable_sort(idx.begin(), idx.end(), [&](auto a, auto b) { return p[a] < p[b]; });
        for (std::size_t i = 0; i < m; ++i) {
            check(adj[i] >= p[i] && adj[i] <= 1.0, "adjusted value out of range");
            if (i) check(adj[idx[i]] >= adj[idx[i - 1]], "adjusted values not monotone");
            if (p[i] * static_cast<double>(m) < 0.05) check(adj[i] < 0.05, "Bonferroni rejection not kept");
        }
    }
    return "500 vectors exact; monotone; Bonferroni rejections kept";
}

// ---- 4 --------------------------------------------------------------------

std::string auc_mann_whitney() {
    std::mt19937 gen(4);
    double worst = 0.0;
    for (int t = 0; t < 100; ++t) {
        const int n = std::uniform_int_distribution<int>(2, 200)(gen);
        std::vector<double> s(static_cast<std::size_t>(n));
        std::unique_ptr<bool[]> pos(new bool[static_cast<std::size_t>(n)]);
        for (int i = 0; i < n; ++i) {
            s[static_cast<std::size_t>(i)] = t % 2 ? std::uniform_int_distribution<int>(0, 5)(gen)
                                                   : std::uniform_real_distribution<double>(0, 1)(gen);
            pos[static_cast<std::size_t>(i)] = std::uniform_int_distribution<int>(0, 1)(gen) == 1;
        }
        pos[0] = true;
        pos[1] = false;
        double wins = 0.0, pairs = 0.0;
        for (int i = 0; i < n; ++i) {
            if (!pos[static_cast<std::size_t>(i)]) continue;
            for (int j = 0; j < n; ++j) {
                if (pos[static_cast<std::size_t>(j)]) continue;
                pairs += 1.0;
                const double a = s[static_cast<std::size_t>(i)], b = s[static_cast<std::size_t>(j)];
                wins += a > b ? 1.0 : (a == b ? 0.5 : 0.0);
            }
        }
        const double got = binary_auc(s, std::span<const bool>(pos.get(), static_cast<std::size_t>(n)));
        worst = std::max(worst, std::abs(got - wins / pairs));
        check(std::abs(got - wins / pairs) <= 1e-12, "set " + std::to_string(t) + " differs from pair count");
    }
    const std::vector<double> flat(50, 0.3);
    std::unique_ptr<bool[]> half(new bool[50]);
    for (int i = 0; i < 50; ++i) half[static_cast<std::size_t>(i)] = i % 3 == 0;
    const double a = binary_auc(flat, std::span<const bool>(half.get(), 50));
    check(a == 0.5, "all-equal scores gave " + fmt("%.17g", a));
    return "100 sets, max |diff| " + fmt("%.1e", worst) + "; all-equal = 0.5";
}

// ---- 5 --------------------------------------------------------------------

double nmi_oracle(const std::vector<int>& a, const std::vector<int>& b) {
    const double n = static_cast<double>(a.size());
    std::map<int, double> pa, pb;
    std::map<std::pair<int, int>, double> pab;
    for (std::size_t i = 0; i < a.size(); ++i) {
        pa[a[i]] += 1 / n;
        pb[b[i]] += 1 / n;
        pab[{a[i], b[i]}] += 1 / n;
    }
    double ha = 0, hb = 0, mi = 0;
    for (auto [_, p] : pa) ha -= p * std::log(p);
    for (auto [_, p] : pb) hb -= p * std::log(p);
    for (auto [k, p] : pab) mi += p * std::log(p / (pa[k.first] * pb[k.second]));
    if (ha == 0 || hb == 0) return 0.0;
    return mi / std::sqrt(ha * hb);
}

std::string nmi_check() {
    std::mt19937 gen(5);
    double worst = 0.0;
    for (int t = 0; t < 100; ++t) {
        const int n = std::uniform_int_distribution<int>(2, 100)(gen);
        const int ka = std::uniform_int_distribution<int>(2, 6)(gen), kb = std::uniform_int_distribution<int>(2, 6)(gen);
        std::vector<int> a(static_cast<std::size_t>(n)), b(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) {
            a[static_cast<std::size_t>(i)] = std::uniform_int_distribution<int>(0, ka - 1)(gen);
            b[static_cast<std::size_t>(i)] = std::uniform_int_distribution<int>(0, kb - 1)(gen);
        }
        if (std::set<int>(a.begin(), a.end()).size() < 2 || std::set<int>(b.begin(), b.end()).size() < 2) {
            --t;
            continue;
        }
        const double got = nmi(a, b);
        worst = std::max(worst, std::abs(got - nmi_oracle(a, b)));
        check(std::abs(got - nmi_oracle(a, b)) <= 1e-12, "pair " + std::to_string(t) + " differs from oracle");
        std::vector<int> relabelled(a);
        for (auto& v : relabelled) v = 10 - v;
        check(nmi(a, relabelled) == 1.0, "identical partitions (relabelled) not 1");
    }
    const std::vector<int> one(30, 0);
    std::vector<int> classes(30);
    for (int i = 0; i < 30; ++i) classes[static_cast<std::size_t>(i)] = i % 3;
    check(nmi(one, classes) == 0.0, "single cluster vs 3 classes not 0");
    check(nmi(classes, classes) == 1.0, "identical partitions not 1");
    return "100 pairs, max |diff| " + fmt("%.1e", worst) + "; identical = 1; single cluster = 0";
}

// ---- 6 --------------------------------------------------------------------

std::string fsdem_exactness() {
    std::mt19937 gen(6);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    auto make = [](const std::vector<double>& xs, const std::vector<double>& vs) {
        MetricCurve c;
        for (std::size_t i = 0; i < xs.size(); ++i) c.points.push_back({xs[i], vs[i]});
        return c;
    };
    auto random_grid = [&](std::size_t n) {
        std::vector<double> xs{u(gen)};
        while (xs.size() < n) xs.push_back(xs.back() + 0.01 + u(gen));
        return xs;
    };
    for (int t = 0; t < 50; ++t) {
        const auto xs = random_grid(2 + static_cast<std::size_t>(t % 19));
        const double c = u(gen);
        check(std::abs(fsdem(make(xs, std::vector<double>(xs.size(), c))) - c) <= 1e-12, "constant curve");
        const double slope = u(gen) * 4 - 2, icept = u(gen);
        std::vector<double> vs;
        for (double x : xs) vs.push_back(icept + slope * x);
        const double mid = icept + slope * (xs.front() + xs.back()) / 2;
        check(std::abs(fsdem(make(xs, vs)) - mid) <= 1e-12, "linear curve");
    }
    double worst = 0.0;
    for (int t = 0; t < 20; ++t) {
        const auto xs = random_grid(20);
        std::vector<double> vs(20);
        for (auto& v : vs) v = u(gen);
        const MetricCurve c = make(xs, vs);
        // midpoint rule on a fine grid over the interpolant
        const std::size_t steps = 2000000;
        const double h = (c.b() - c.a()) / static_cast<double>(steps);
        double total = 0.0;
        for (std::size_t i = 0; i < steps; ++i) total += c.interpolate(c.a() + (static_cast<double>(i) + 0.5) * h);
        const double quad = total * h / (c.b() - c.a());
        worst = std::max(worst, std::abs(fsdem(c) - quad));
        check(std::abs(fsdem(c) - quad) <= 1e-9, "random curve " + std::to_string(t) + " differs from quadrature");
    }
    return "constant/linear exact to 1e-12; 20 random curves, max |diff| " + fmt("%.1e", worst);
}

// ---- 7 --------------------------------------------------------------------

std::string laplacian_oracle() {
    std::mt19937 gen(7);
    std::normal_distribution<double> z;
    double worst = 0.0;
    for (int t = 0; t < 20; ++t) {
        const Eigen::Index n = 30, d = 10;
        Matrix X(n, d);
        for (Eigen::Index i = 0; i < n; ++i)
            for (Eigen::Index j = 0; j < d; ++j) X(i, j) = z(gen);

        // dense kNN heat-kernel graph, median bandwidth over edges
        Matrix dist(n, n);
        for (Eigen::Index i = 0; i < n; ++i)
            for (Eigen::Index j = 0; j < n; ++j) dist(i, j) = (X.row(i) - X.row(j)).squaredNorm();
        Matrix adj = Matrix::Zero(n, n);
        for (Eigen::Index i = 0; i < n; ++i) {
            std::vector<Eigen::Index> idx;
            for (Eigen::Index j = 0; j < n; ++j)
                if (j != i) idx.push_back(j);
            std::stable_sort(idx.begin(), idx.end(), [&](auto a, auto b) { return dist(i, a) < dist(i, b); });
            for (int k = 0; k < 5; ++k) adj(i, idx[static_cast<std::size_t>(k)]) = adj(idx[static_cast<std::size_t>(k)], i) = 1;
        }
        std::vector<double> edges;
        for (Eigen::Index i = 0; i < n; ++i)
            for (Eigen::Index j = i + 1; j < n; ++j)
                if (adj(i, j) > 0) edges.push_back(dist(i, j));
        std::sort(edges.begin(), edges.end());
        const std::size_t m = edges.size();
        const double bw = m % 2 ? edges[m / 2] : (edges[m / 2 - 1] + edges[m / 2]) / 2;
        Matrix S = Matrix::Zero(n, n);
        for (Eigen::Index i = 0; i < n; ++i)
            for (Eigen::Index j = 0; j < n; ++j)
                if (adj(i, j) > 0) S(i, j) = std::exp(-dist(i, j) / bw);
        const Vector ones = Vector::Ones(n);
        const Matrix D = (S * ones).asDiagonal();
        const Matrix L = D - S;
        auto dense_ls = [&](const Matrix& F) {
            Vector out(F.cols());
            for (Eigen::Index j = 0; j < F.cols(); ++j) {
                const Vector f = F.col(j);
                const Vector ft = f - (f.dot(D * ones) / ones.dot(D * ones)) * ones;
                out(j) = ft.dot(L * ft) / ft.dot(D * ft);
            }
            return out;
        };

        GraphParams params;
        params.k_neighbors = 5;
        const SimilarityGraph g = build_knn_graph(X, params);
        const Vector got = laplacian_scores(X, g);
        const Vector want = dense_ls(X);
        for (Eigen::Index j = 0; j < d; ++j) {
            worst = std::max(worst, std::abs(got(j) - want(j)));
            check(std::abs(got(j) - want(j)) <= 1e-9, "dataset " + std::to_string(t) + " feature " + std::to_string(j));
        }
        Matrix Y = X;
        for (Eigen::Index j = 0; j < d; ++j) Y.col(j) = (0.1 + 5.0 * std::abs(z(gen))) * (z(gen) < 0 ? -1 : 1) * Y.col(j).array() + 3.0 * z(gen);
        const Vector moved = laplacian_scores(Y, g);
        for (Eigen::Index j = 0; j < d; ++j) check(std::abs(moved(j) - got(j)) <= 1e-9, "affine transform changed LS");
    }
    return "20 datasets 30x10, max |diff| " + fmt("%.1e", worst) + "; affine invariant with fixed graph";
}

// ---- 8 --------------------------------------------------------------------

std::string random_uniformity() {
    const std::size_t d = 6, seeds = 60000;
    std::vector<std::vector<double>> count(d, std::vector<double>(d, 0.0));
    for (std::size_t s = 0; s < seeds; ++s) {
        const FeatureRanking r = random_ranking(d, s);
        for (std::size_t pos = 0; pos < d; ++pos) count[r.order[pos]][pos] += 1.0;
    }
    double worst = 0.0;
    for (const auto& row : count)
        for (double c : row) worst = std::max(worst, std::abs(c / seeds - 1.0 / 6.0));
    check(worst <= 0.02, "max deviation " + fmt("%.4f", worst));
    return "36 cells, max |freq - 1/6| = " + fmt("%.4f", worst);
}

// ---- 9 --------------------------------------------------------------------

std::string random_calibration() {
    Rng rng(9);
    Dataset ds;
    ds.name = "random_labels";
    ds.X.resize(2000, 50);
    for (Eigen::Index i = 0; i < 2000; ++i)
        for (Eigen::Index j = 0; j < 50; ++j) ds.X(i, j) = rng.normal();
    Labels y(2000);
    for (std::size_t i = 0; i < 2000; ++i) y[i] = i < 1000 ? 0 : 1;
    rng.shuffle(std::span<int>(y));
    ds.y = y;

    SweepConfig cfg;
    cfg.repetitions = 20;
    cfg.seed = 9;
    const SweepSpec at20{0.2, 0.2, 0.05};
    const SweepResult res = run_sweep(ds, {"random"}, at20, cfg, SelectorRegistry::builtin({}));
    double total = 0.0;
    std::size_t n = 0;
    for (const auto& r : res.records) {
        if (r.metric != Metric::auc) continue;
        check(r.ok && r.k == 10, "unexpected record");
        total += r.value;
        ++n;
    }
    check(n == 20, "expected 20 AUC records");
    const double mean = total / static_cast<double>(n);
    check(mean >= 0.45 && mean <= 0.55, "mean AUC " + fmt("%.4f", mean));
    return "mean AUC over 20 repetitions at k=10 of 50: " + fmt("%.4f", mean);
}

// ---- 10 -------------------------------------------------------------------

std::string runtime_ordering() {
    Dataset ds = synth_blobs(2000, 100, 2, 10, 10);
    ds = standardize(ds).first;
    const SelectorRegistry reg = SelectorRegistry::builtin({});
    auto median5 = [&](const std::string& method) {
        std::vector<double> t;
        for (std::uint64_t i = 0; i < 5; ++i) {
            const auto t0 = clock_type::now();
            reg.get(method).rank(ds, i);
            t.push_back(seconds_since(t0));
        }
        std::sort(t.begin(), t.end());
        return t[2];
    };
    const double random = median5("random"), ls = median5("laplacian"), mcfs = median5("mcfs");
    check(ls >= 10 * random, "laplacian only " + fmt("%.1f", ls / random) + "x slower");
    check(mcfs >= 10 * random, "mcfs only " + fmt("%.1f", mcfs / random) + "x slower");

    SelectorRegistry with_stub = reg;
    with_stub.add({"slow", false, [](const Dataset& d, std::uint64_t) {
                       if (d.feature_count() >= 30) std::this_thread::sleep_for(std::chrono::milliseconds(1500));
                       return variance_ranking(d);
                   }});
    RuntimeGrid grid;
    grid.fixed = 20;
    grid.start = 10;
    grid.stop = 50;
    grid.step = 10;
    grid.cap = std::chrono::duration<double>(1.0);
    const auto recs = run_runtime_bench({"random", "slow"}, grid, {}, with_stub);
    std::vector<RuntimeRecord> slow;
    std::size_t random_points = 0;
    for (const auto& r : recs) {
        if (r.method == "slow") slow.push_back(r);
        else random_points += 1;
    }
    check(random_points == 5, "random series incomplete");
    check(slow.size() == 3 && slow.back().features == 30 && slow.back().over_cap, "skip rule did not fire at d=30");
    check(!slow[0].over_cap && !slow[1].over_cap, "early points flagged");
    check(slow.back().seconds >= 1.0 && slow.back().seconds < 1.5, "over-cap time " + fmt("%.3f", slow.back().seconds));

    char buf[200];
    std::snprintf(buf, sizeof buf,
                  "median s: random %.2e, laplacian %.2e (%.0fx), mcfs %.2e (%.0fx); stub capped at d=30 after %.2f s",
                  random, ls, ls / random, mcfs, mcfs / random, slow.back().seconds);
    return buf;
}

// ---- 11 -------------------------------------------------------------------

struct SmokeRun {
    std::map<std::string, std::string> files;  // relative path -> bytes
};

SmokeRun smoke_once(const fs::path& dir) {
    fs::create_directories(dir / "data");
    for (int i = 0; i < 3; ++i) {
        SynthOptions s;
        s.out = dir / "data" / ("smoke" + std::to_string(i) + ".csv");
        s.instances = 73;
        s.features = 325;
        s.classes = 7;
        s.informative = 20;
        s.seed = static_cast<std::uint64_t>(100 + i);
        std::ostringstream o, e;
        check(cmd_synth(s, o, e) == 0, "synth: " + e.str());
    }
    std::ofstream(dir / "bench.conf") << "# three small high-dimensional datasets\n"
                                         "datasets_dir = data\n"
                                         "methods = random, variance, correlation, laplacian, mcfs\n"
                                         "sweep = extreme\n"
                                         "repetitions = 100\n"
                                         "seed = 2024\n"
                                         "store = records.jsonl\n";
    RunOptions run;
    run.config = dir / "bench.conf";
    run.quiet = true;
    std::ostringstream out, err;
    check(cmd_run(run, out, err) == 0, "run: " + err.str());
    AnalyzeOptions an;
    an.store = dir / "records.jsonl";
    an.out = dir / "report";
    check(cmd_analyze(an, out, err) == 0, "analyze: " + err.str());

    SmokeRun r;
    r.files["records.jsonl"] = slurp(dir / "records.jsonl");
    for (const auto& e : fs::directory_iterator(dir / "report")) r.files["report/" + e.path().filename().string()] = slurp(e.path());
    return r;
}

std::string smoke_reproduction() {
    const fs::path root = fs::temp_directory_path() / ("fsbench_acceptance_" + std::to_string(::getpid()));
    fs::remove_all(root);
    const auto t0 = clock_type::now();
    const SmokeRun first = smoke_once(root / "a");
    const double secs = seconds_since(t0);
    check(secs < 1800.0, "sweep took " + fmt("%.0f", secs) + " s");

    const std::vector<std::string> methods{"correlation", "laplacian", "mcfs", "random", "variance"};
    const std::vector<std::string> metrics{"ACC", "AUC", "CLSACC", "NMI"};
    for (int i = 0; i < 3; ++i) {
        for (const auto& m : metrics) {
            const std::string name = "report/sweep_smoke" + std::to_string(i) + "_" + m + ".svg";
            check(first.files.count(name), name + " missing");
            const std::string& svg = first.files.at(name);
            check(svg.find("class=\"band\"") != std::string::npos, name + " has no baseline band");
            std::size_t lines = 0;
            for (std::size_t p = svg.find("class=\"series\""); p != std::string::npos; p = svg.find("class=\"series\"", p + 1)) ++lines;
            check(lines == methods.size(), name + " should draw one line per method");
        }
    }

    const auto fsdem_rows = csv_rows(first.files.at("report/fsdem.csv"));
    check(fsdem_rows.size() == 3 * methods.size() * metrics.size(), "FSDEM table has " + std::to_string(fsdem_rows.size()) + " rows");
    for (const auto& r : fsdem_rows) {
        const std::size_t expect = r[1] == "random" ? 100 : 1;
        check(std::stoul(r[3]) == expect && r[4] == "0", "FSDEM row " + r[0] + "/" + r[1] + " repetition counts");
    }
    const auto z_rows = csv_rows(first.files.at("report/zscore.csv"));
    check(z_rows.size() == 3 * methods.size() * metrics.size() * 20, "Z table has " + std::to_string(z_rows.size()) + " rows");
    std::size_t random_rows = 0;
    for (const auto& r : z_rows) {
        if (r[1] != "random") continue;
        ++random_rows;
        check(std::stod(r[8]) == 0.0 && r[5] == r[6], "random Z row not zero at the mean");
    }
    check(random_rows == 3 * metrics.size() * 20, "random Z rows missing");

    const double m = static_cast<double>(methods.size());
    for (const auto& metric : metrics) {
        check(first.files.count("report/cd_" + metric + ".svg"), "CD diagram for " + metric + " missing");
        std::map<std::string, double> rank_sum;
        for (const auto& r : csv_rows(first.files.at("report/ranks_" + metric + ".csv"))) rank_sum[r[0]] += std::stod(r[3]);
        check(rank_sum.size() == 3, metric + ": CD ranks cover " + std::to_string(rank_sum.size()) + " datasets");
        for (const auto& [ds, s] : rank_sum) check(std::abs(s - m * (m + 1) / 2) < 1e-12, metric + ": rank sum " + fmt("%g", s) + " on " + ds);
    }

    const SmokeRun second = smoke_once(root / "b");
    check(first.files.size() == second.files.size(), "rerun produced a different file set");
    for (const auto& [name, bytes] : first.files) {
        check(second.files.count(name) && second.files.at(name) == bytes, "rerun differs: " + name);
    }
    fs::remove_all(root);
    return "3 datasets 73x325, 5 methods, " + std::to_string(first.files.size()) + " artifacts in " + fmt("%.1f", secs) +
           " s; rerun byte-identical";
}

// ---- 12 -------------------------------------------------------------------

std::string kmeans_invariant() {
    std::size_t iterations = 0;
    for (std::uint64_t t = 0; t < 100; ++t) {
        Dataset ds = synth_blobs(60 + t, 2 + t % 5, 3, 2, t);
        const KMeansResult r = kmeans(ds.X, 2 + t % 4, t);
        for (std::size_t i = 1; i < r.inertia_history.size(); ++i) {
            check(r.inertia_history[i] <= r.inertia_history[i - 1], "inertia rose in trial " + std::to_string(t));
        }
        iterations += r.inertia_history.size();
        const KMeansResult one = kmeans(ds.X, 1, t);
        const Vector means = ds.X.colwise().mean().transpose();
        for (Eigen::Index j = 0; j < ds.X.cols(); ++j) {
            check(std::abs(one.centroids(0, j) - means(j)) <= 1e-12, "k=1 centroid differs from column mean");
        }
    }
    return "100 trials, " + std::to_string(iterations) + " Lloyd steps, no increase; k=1 centroid = column means";
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<std::string()>>> criteria{
        {"Hungarian vs permutation enumeration", hungarian_oracle},
        {"Wilcoxon exact p vs sign enumeration", wilcoxon_exactness},
        {"Holm step-down", holm_correctness},
        {"AUC vs Mann-Whitney pair count", auc_mann_whitney},
        {"NMI vs contingency entropies", nmi_check},
        {"FSDEM exactness", fsdem_exactness},
        {"Laplacian Score vs dense formula", laplacian_oracle},
        {"random ranking uniformity", random_uniformity},
        {"random-classifier calibration", random_calibration},
        {"runtime ordering and cap/skip", runtime_ordering},
        {"end-to-end smoke sweep", smoke_reproduction},
        {"k-means invariants", kmeans_invariant},
    };
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const auto& [name, fn] = criteria[i];
        const auto t0 = clock_type::now();
        std::string detail;
        bool ok = false;
        try {
            detail = fn();
            ok = true;
        } catch (const std::exception& e) {
            detail = e.what();
        }
        failed += !ok;
        std::printf("%s %2zu %s: %s (%.1f s)\n", ok ? "PASS" : "FAIL", i + 1, name.c_str(), detail.c_str(),
                    seconds_since(t0));
        std::fflush(stdout);
    }
    std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
    return failed ? 1 : 0;
}

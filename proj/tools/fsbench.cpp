#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "fsbench/report/commands.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Feature selection benchmark against a random-ranking baseline"};
    app.require_subcommand(1);

    fsbench::RunOptions run;
    std::optional<std::string> run_store;
    std::optional<std::uint64_t> run_seed;
    auto* run_cmd = app.add_subcommand("run", "Fraction sweeps over the configured datasets and methods");
    run_cmd->add_option("--config", run.config, "Config file")->required()->check(CLI::ExistingFile);
    run_cmd->add_option("--store", run_store, "Record store (overrides the config)");
    run_cmd->add_option("--seed", run_seed, "Master seed (overrides the config)");
    run_cmd->add_flag("--dry-run", run.dry_run, "Print the planned cell count and exit");
    run_cmd->add_flag("--quiet", run.quiet, "No progress counters");

    fsbench::RuntimeOptions rt;
    std::optional<std::string> rt_store;
    std::optional<std::uint64_t> rt_seed;
    auto* rt_cmd = app.add_subcommand("runtime", "Selector runtime scaling on synthetic data");
    rt_cmd->add_option("--config", rt.config, "Config file")->required()->check(CLI::ExistingFile);
    rt_cmd->add_option("--store", rt_store, "Runtime record store (overrides the config)");
    rt_cmd->add_option("--seed", rt_seed, "Master seed (overrides the config)");
    rt_cmd->add_flag("--dry-run", rt.dry_run, "Print the planned point count and exit");

    fsbench::AnalyzeOptions an;
    std::optional<std::string> an_metric, an_dataset;
    auto* an_cmd = app.add_subcommand("analyze", "FSDEM, Z-score and critical-difference reports");
    an_cmd->add_option("--store", an.store, "Record store")->required()->check(CLI::ExistingFile);
    an_cmd->add_option("--out", an.out, "Report directory")->capture_default_str();
    an_cmd->add_option("--alpha", an.alpha, "Significance level for the CD cliques")->capture_default_str();
    an_cmd->add_option("--metric", an_metric, "Only this metric (ACC, AUC, CLSACC, NMI)");
    an_cmd->add_option("--dataset", an_dataset, "Only this dataset");
    an_cmd->add_option("--baseline", an.baseline, "Baseline method name")->capture_default_str();

    fsbench::PlotOptions pl;
    std::optional<std::string> pl_metric, pl_dataset;
    auto* pl_cmd = app.add_subcommand("plot", "Render one SVG plot");
    pl_cmd->add_option("--store", pl.store, "Record store")->required()->check(CLI::ExistingFile);
    pl_cmd->add_option("--out", pl.out, "Output SVG file")->required();
    pl_cmd->add_option("--kind", pl.kind, "sweep, zscore, runtime or cdd")->capture_default_str();
    pl_cmd->add_option("--metric", pl_metric, "Metric (ACC, AUC, CLSACC, NMI)");
    pl_cmd->add_option("--dataset", pl_dataset, "Dataset name");
    pl_cmd->add_option("--alpha", pl.alpha, "Significance level for the CD cliques")->capture_default_str();

    fsbench::SynthOptions sy;
    auto* sy_cmd = app.add_subcommand("synth", "Write a Gaussian-blob dataset as CSV (label in the last column)");
    sy_cmd->add_option("--out", sy.out, "Output CSV file")->required();
    sy_cmd->add_option("--instances,-n", sy.instances, "Instances")->capture_default_str();
    sy_cmd->add_option("--features,-d", sy.features, "Features")->capture_default_str();
    sy_cmd->add_option("--classes,-c", sy.classes, "Clusters / classes")->capture_default_str();
    sy_cmd->add_option("--informative", sy.informative, "Features carrying cluster signal")->capture_default_str();
    sy_cmd->add_option("--separation", sy.blobs.separation, "Centre spacing per informative feature")->capture_default_str();
    sy_cmd->add_option("--noise", sy.blobs.noise, "Within-cluster standard deviation")->capture_default_str();
    sy_cmd->add_option("--seed", sy.seed, "Seed")->capture_default_str();
    sy_cmd->add_flag("--header", sy.header, "Write a header row");

    CLI11_PARSE(app, argc, argv);

    if (*run_cmd) {
        if (run_store) run.store = *run_store;
        run.seed = run_seed;
        return fsbench::cmd_run(run, std::cout, std::cerr);
    }
    if (*rt_cmd) {
        if (rt_store) rt.store = *rt_store;
        rt.seed = rt_seed;
        return fsbench::cmd_runtime(rt, std::cout, std::cerr);
    }
    if (*an_cmd) {
        an.metric = an_metric;
        an.dataset = an_dataset;
        return fsbench::cmd_analyze(an, std::cout, std::cerr);
    }
    if (*pl_cmd) {
        pl.metric = pl_metric;
        pl.dataset = pl_dataset;
        return fsbench::cmd_plot(pl, std::cout, std::cerr);
    }
    return fsbench::cmd_synth(sy, std::cout, std::cerr);
}

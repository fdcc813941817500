#include <cstdint>
#include <exception>
#include <iostream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "mlutd/cli.hpp"

namespace {

using nlohmann::json;

// Records a flag's value in `overrides` only when it was given on the command line.
template <class T>
struct Flag {
    T value{};
    CLI::Option* option = nullptr;
};

template <class T>
void collect(json& overrides, const char* key, const Flag<T>& flag) {
    if (flag.option != nullptr && flag.option->count() > 0) overrides[key] = flag.value;
}

template <class Config>
Config resolve(const char* command, const std::string& config_path, const json& overrides) {
    const json doc = mlutd::merge_config(command, json(Config{}), config_path, overrides);
    return doc.get<Config>();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Tail dependence of degrees in multilayer inhomogeneous random graphs"};
    app.require_subcommand(1);
    std::string config_path;

    // simulate
    auto* sim = app.add_subcommand("simulate", "Sample one network; write weights, degrees and UTD estimates");
    sim->add_option("--config", config_path, "JSON config file")->check(CLI::ExistingFile);
    Flag<std::string> sim_scenario, sim_threshold, sim_backend, sim_output;
    Flag<std::size_t> sim_nodes;
    Flag<std::uint64_t> sim_seed;
    Flag<bool> sim_edges;
    sim_scenario.option = sim->add_option("--scenario", sim_scenario.value, "e.g. gumbel:theta=2, polar:beta=0.5/0.5");
    sim_nodes.option = sim->add_option("-n,--n,--nodes", sim_nodes.value, "number of nodes");
    sim_threshold.option = sim->add_option("--threshold", sim_threshold.value, "top:<count> or quantile:<level>");
    sim_backend.option = sim->add_option("--backend", sim_backend.value, "auto, pairwise or fast");
    sim_seed.option = sim->add_option("--seed", sim_seed.value, "master seed");
    sim_output.option = sim->add_option("-o,--output", sim_output.value, "output directory");
    sim_edges.option = sim->add_flag("--edges", sim_edges.value, "also write per-layer edge lists");

    // replicate
    auto* rep = app.add_subcommand("replicate", "Run the replication grid and write report, MSE and scatter CSVs");
    rep->add_option("--config", config_path, "JSON config file")->check(CLI::ExistingFile);
    Flag<std::vector<std::string>> rep_scenarios;
    Flag<std::vector<std::size_t>> rep_sizes;
    Flag<std::string> rep_threshold, rep_backend, rep_output;
    Flag<std::size_t> rep_reps;
    Flag<std::uint64_t> rep_seed;
    Flag<bool> rep_scatter;
    std::size_t workers = std::max(1u, std::thread::hardware_concurrency());
    rep_scenarios.option = rep->add_option("--scenario", rep_scenarios.value, "scenario (repeatable)");
    rep_sizes.option = rep->add_option("--sizes", rep_sizes.value, "node counts")->delimiter(',');
    rep_threshold.option = rep->add_option("--threshold", rep_threshold.value, "top:<count> or quantile:<level>");
    rep_reps.option = rep->add_option("--replications", rep_reps.value, "replications per cell");
    rep_backend.option = rep->add_option("--backend", rep_backend.value, "auto, pairwise or fast");
    rep_seed.option = rep->add_option("--seed", rep_seed.value, "master seed");
    rep_output.option = rep->add_option("-o,--output", rep_output.value, "output directory");
    rep_scatter.option = rep->add_flag("--scatter,!--no-scatter", rep_scatter.value, "write per-cell scatter CSVs");
    rep->add_option("--workers", workers, "worker threads (results do not depend on this)")
        ->check(CLI::PositiveNumber);

    // analyze
    auto* ana = app.add_subcommand("analyze", "UTD series, Hill check and price correlation for period edge lists");
    ana->add_option("--config", config_path, "JSON config file")->check(CLI::ExistingFile);
    Flag<std::vector<std::string>> ana_periods;
    Flag<std::string> ana_prices, ana_threshold, ana_delimiter, ana_alignment, ana_output;
    Flag<std::size_t> ana_hill_k;
    ana_periods.option = ana->add_option("periods", ana_periods.value, "edge-list files in time order");
    ana_prices.option = ana->add_option("--prices", ana_prices.value, "CSV with period,initial_price,final_price");
    ana_threshold.option = ana->add_option("--threshold", ana_threshold.value, "top:<count> or quantile:<level>");
    ana_delimiter.option = ana->add_option("--delimiter", ana_delimiter.value, "auto, whitespace or comma");
    ana_alignment.option = ana->add_option("--alignment", ana_alignment.value, "price period for pair (m, m+1): second or first");
    ana_hill_k.option = ana->add_option("--hill-k", ana_hill_k.value, "Hill order statistics (0 = ceil(0.05 N))");
    ana_output.option = ana->add_option("-o,--output", ana_output.value, "output directory");

    // truth
    auto* tru = app.add_subcommand("truth", "Print the true tail dependence of scenarios");
    tru->add_option("--config", config_path, "JSON config file")->check(CLI::ExistingFile);
    Flag<std::vector<std::string>> tru_scenarios;
    Flag<double> tru_precision;
    Flag<bool> tru_cross;
    Flag<std::size_t> tru_draws;
    Flag<std::uint64_t> tru_seed;
    tru_scenarios.option = tru->add_option("--scenario", tru_scenarios.value, "scenario (repeatable)");
    tru_precision.option = tru->add_option("--precision", tru_precision.value, "target precision");
    tru_cross.option = tru->add_flag("--cross-check", tru_cross.value, "also run the Monte Carlo route for polar scenarios");
    tru_draws.option = tru->add_option("--draws", tru_draws.value, "Monte Carlo draws");
    tru_seed.option = tru->add_option("--seed", tru_seed.value, "seed for the Monte Carlo route");

    CLI11_PARSE(app, argc, argv);

    try {
        json overrides = json::object();
        if (sim->parsed()) {
            collect(overrides, "scenario", sim_scenario);
            collect(overrides, "nodes", sim_nodes);
            collect(overrides, "threshold", sim_threshold);
            collect(overrides, "backend", sim_backend);
            collect(overrides, "seed", sim_seed);
            collect(overrides, "output", sim_output);
            collect(overrides, "edges", sim_edges);
            mlutd::cmd_simulate(resolve<mlutd::SimulateConfig>("simulate", config_path, overrides), std::cout,
                                std::cerr);
        } else if (rep->parsed()) {
            collect(overrides, "scenarios", rep_scenarios);
            collect(overrides, "sizes", rep_sizes);
            collect(overrides, "threshold", rep_threshold);
            collect(overrides, "replications", rep_reps);
            collect(overrides, "backend", rep_backend);
            collect(overrides, "seed", rep_seed);
            collect(overrides, "output", rep_output);
            collect(overrides, "scatter", rep_scatter);
            mlutd::cmd_replicate(resolve<mlutd::ReplicateConfig>("replicate", config_path, overrides), workers,
                                 std::cout, std::cerr);
        } else if (ana->parsed()) {
            collect(overrides, "periods", ana_periods);
            collect(overrides, "prices", ana_prices);
            collect(overrides, "threshold", ana_threshold);
            collect(overrides, "delimiter", ana_delimiter);
            collect(overrides, "alignment", ana_alignment);
            collect(overrides, "hill_k", ana_hill_k);
            collect(overrides, "output", ana_output);
            mlutd::cmd_analyze(resolve<mlutd::AnalyzeConfig>("analyze", config_path, overrides), std::cout,
                               std::cerr);
        } else if (tru->parsed()) {
            collect(overrides, "scenarios", tru_scenarios);
            collect(overrides, "precision", tru_precision);
            collect(overrides, "cross_check", tru_cross);
            collect(overrides, "draws", tru_draws);
            collect(overrides, "seed", tru_seed);
            mlutd::cmd_truth(resolve<mlutd::TruthConfig>("truth", config_path, overrides), std::cout, std::cerr);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}

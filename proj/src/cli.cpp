#include "mlutd/cli.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <ostream>
#include <random>
#include <utility>

#include "format.hpp"
#include "mlutd/errors.hpp"
#include "mlutd/harness.hpp"
#include "mlutd/ingestion.hpp"
#include "mlutd/mirg.hpp"
#include "mlutd/random.hpp"
#include "mlutd/tailstats.hpp"
#include "mlutd/weights.hpp"

namespace mlutd {

namespace fs = std::filesystem;
using nlohmann::json;
using detail::format_double;

namespace {

void check_keys(const json& j, std::initializer_list<const char*> allowed) {
    if (!j.is_object()) throw ParameterError("config must be a JSON object");
    for (const auto& [key, value] : j.items()) {
        if (key == "command") continue;
        if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; }))
            throw ParameterError("unknown config key '" + key + "'");
    }
}

template <class T>
void read_key(const json& j, const char* key, T& field) {
    if (j.contains(key)) j.at(key).get_to(field);
}

void read_seed(const json& j, std::optional<std::uint64_t>& seed) {
    if (!j.contains("seed") || j.at("seed").is_null()) {
        seed.reset();
        return;
    }
    seed = j.at("seed").get<std::uint64_t>();
}

json seed_json(const std::optional<std::uint64_t>& seed) { return seed ? json(*seed) : json(nullptr); }

std::ofstream open_output(const fs::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    return out;
}

void prepare_dir(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw std::runtime_error("cannot create output directory " + dir.string() + ": " + ec.message());
}

void write_config(const fs::path& dir, const char* command, const json& config) {
    json doc = config;
    doc["command"] = command;
    open_output(dir / "config.json") << doc.dump(2) << '\n';
}

void write_weights_csv(std::ostream& out, const WeightMatrix& weights) {
    out << "node";
    for (std::size_t l = 0; l < weights.layers(); ++l) out << ",layer_" << (l + 1);
    out << '\n';
    for (std::size_t i = 0; i < weights.nodes(); ++i) {
        out << i;
        for (std::size_t l = 0; l < weights.layers(); ++l) out << ',' << format_double(weights.values(i, l));
        out << '\n';
    }
}

}  // namespace

void to_json(json& j, const SimulateConfig& c) {
    j = json{{"scenario", c.scenario}, {"nodes", c.nodes},   {"threshold", c.threshold}, {"backend", c.backend},
             {"seed", seed_json(c.seed)}, {"output", c.output}, {"edges", c.edges}};
}

void from_json(const json& j, SimulateConfig& c) {
    check_keys(j, {"scenario", "nodes", "threshold", "backend", "seed", "output", "edges"});
    read_key(j, "scenario", c.scenario);
    read_key(j, "nodes", c.nodes);
    read_key(j, "threshold", c.threshold);
    read_key(j, "backend", c.backend);
    read_seed(j, c.seed);
    read_key(j, "output", c.output);
    read_key(j, "edges", c.edges);
}

void to_json(json& j, const ReplicateConfig& c) {
    j = json{{"scenarios", c.scenarios},       {"sizes", c.sizes},     {"threshold", c.threshold},
             {"replications", c.replications}, {"backend", c.backend}, {"seed", seed_json(c.seed)},
             {"output", c.output},             {"scatter", c.scatter}};
}

void from_json(const json& j, ReplicateConfig& c) {
    check_keys(j, {"scenarios", "sizes", "threshold", "replications", "backend", "seed", "output", "scatter"});
    read_key(j, "scenarios", c.scenarios);
    read_key(j, "sizes", c.sizes);
    read_key(j, "threshold", c.threshold);
    read_key(j, "replications", c.replications);
    read_key(j, "backend", c.backend);
    read_seed(j, c.seed);
    read_key(j, "output", c.output);
    read_key(j, "scatter", c.scatter);
}

void to_json(json& j, const AnalyzeConfig& c) {
    j = json{{"periods", c.periods},     {"prices", c.prices},       {"threshold", c.threshold},
             {"delimiter", c.delimiter}, {"alignment", c.alignment}, {"hill_k", c.hill_k},
             {"output", c.output}};
}

void from_json(const json& j, AnalyzeConfig& c) {
    check_keys(j, {"periods", "prices", "threshold", "delimiter", "alignment", "hill_k", "output"});
    read_key(j, "periods", c.periods);
    read_key(j, "prices", c.prices);
    read_key(j, "threshold", c.threshold);
    read_key(j, "delimiter", c.delimiter);
    read_key(j, "alignment", c.alignment);
    read_key(j, "hill_k", c.hill_k);
    read_key(j, "output", c.output);
}

void to_json(json& j, const TruthConfig& c) {
    j = json{{"scenarios", c.scenarios},
             {"precision", c.precision},
             {"cross_check", c.cross_check},
             {"draws", c.draws},
             {"seed", seed_json(c.seed)}};
}

void from_json(const json& j, TruthConfig& c) {
    check_keys(j, {"scenarios", "precision", "cross_check", "draws", "seed"});
    read_key(j, "scenarios", c.scenarios);
    read_key(j, "precision", c.precision);
    read_key(j, "cross_check", c.cross_check);
    read_key(j, "draws", c.draws);
    read_seed(j, c.seed);
}

json merge_config(const std::string& command, const json& defaults, const std::string& config_path,
                  const json& overrides) {
    json doc = defaults;
    if (!config_path.empty()) {
        std::ifstream in(config_path);
        if (!in) throw ParseError(config_path, 0, "cannot open config file");
        json file;
        try {
            file = json::parse(in);
        } catch (const json::parse_error& e) {
            throw ParseError(config_path, 0, e.what());
        }
        if (!file.is_object()) throw ParseError(config_path, 0, "config must be a JSON object");
        if (file.contains("command")) {
            if (file.at("command") != command)
                throw ParameterError("config file is for '" + file.at("command").dump() + "', not '" + command + "'");
            file.erase("command");
        }
        // merge_patch treats null as deletion; an explicit null seed means "unset".
        for (const auto& [key, value] : file.items()) doc[key] = value;
    }
    for (const auto& [key, value] : overrides.items()) doc[key] = value;
    return doc;
}

std::uint64_t ensure_seed(std::optional<std::uint64_t>& seed, std::ostream& log) {
    if (!seed) {
        std::random_device rd;
        seed = (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
        log << "seed: " << *seed << '\n';
    }
    return *seed;
}

void cmd_simulate(SimulateConfig config, std::ostream& out, std::ostream& log) {
    const DependenceScenario scenario = parse_scenario(config.scenario);
    const ThresholdSpec threshold = parse_threshold(config.threshold);
    const Backend backend = parse_backend(config.backend);
    if (config.nodes < 2) throw ParameterError("simulate needs at least two nodes");
    resolve_top_count(threshold, config.nodes);
    if (scenario.layers < 2) throw ParameterError("simulate needs at least two layers");
    Rng rng(ensure_seed(config.seed, log));

    const fs::path dir(config.output);
    prepare_dir(dir);
    write_config(dir, "simulate", config);

    const WeightMatrix weights = sample_weights(scenario, config.nodes, rng);
    MultilayerDegrees deg;
    if (config.edges) {
        const MultilayerGraph graph = build_graph(weights, backend, rng);
        for (std::size_t l = 0; l < graph.layer_count(); ++l) {
            auto file = open_output(dir / ("edges_layer_" + std::to_string(l + 1) + ".txt"));
            write_edge_list(file, graph, l);
        }
        deg = degrees(graph);
    } else {
        deg = sample_degrees(weights, backend, rng);
    }

    {
        auto file = open_output(dir / "weights.csv");
        write_weights_csv(file, weights);
    }
    {
        auto file = open_output(dir / "degrees.csv");
        write_degrees_csv(file, deg);
    }
    const auto& counts = std::as_const(deg).values;
    const auto lw = utd_estimate(weights.values.column(0), weights.values.column(1), threshold);
    const auto ld = utd_estimate(counts.column(0), counts.column(1), threshold);
    const json summary{{"scenario", to_string(scenario)},
                       {"nodes", config.nodes},
                       {"backend", to_string(deg.source)},
                       {"truth", true_utd(scenario)},
                       {"lambda_weights", lw},
                       {"lambda_degrees", ld}};
    open_output(dir / "utd.json") << summary.dump(2) << '\n';
    out << "lambda_weights " << format_double(lw.lambda_hat) << "\nlambda_degrees " << format_double(ld.lambda_hat)
        << '\n';
}

void cmd_replicate(ReplicateConfig config, std::size_t workers, std::ostream& out, std::ostream& log) {
    ExperimentPlan plan;
    for (const auto& s : config.scenarios) plan.scenarios.push_back(parse_scenario(s));
    plan.sizes = config.sizes;
    plan.threshold = parse_threshold(config.threshold);
    plan.replications = config.replications;
    plan.backend = parse_backend(config.backend);
    plan.validate();
    plan.master_seed = ensure_seed(config.seed, log);

    const fs::path dir(config.output);
    prepare_dir(dir);
    write_config(dir, "replicate", config);

    const ExperimentReport report = run_plan(plan, workers);
    {
        auto file = open_output(dir / "report.csv");
        write_report_csv(file, report);
    }
    {
        auto file = open_output(dir / "mse_curve.csv");
        write_mse_curve_csv(file, report);
    }
    if (config.scatter) {
        prepare_dir(dir / "scatter");
        for (const auto& cell : report.cells) {
            auto file = open_output(dir / "scatter" / (cell_slug(cell) + ".csv"));
            write_scatter_csv(file, cell);
        }
    }
    for (const auto& cell : report.cells) {
        out << cell.scenario << " N=" << cell.nodes << " truth=" << format_double(cell.truth)
            << " mean_w=" << format_double(cell.weights.mean) << " mean_d=" << format_double(cell.degrees.mean)
            << " mse_d=" << format_double(cell.degrees.mse) << '\n';
        log << cell.scenario << " N=" << cell.nodes << " wall " << cell.wall_seconds << " s\n";
        if (cell.flagged)
            log << "warning: " << cell.scenario << " N=" << cell.nodes << " has " << cell.degenerate_count
                << " degenerate replications\n";
    }
}

void cmd_analyze(const AnalyzeConfig& config, std::ostream& out, std::ostream& log) {
    if (config.periods.size() < 2) throw ParameterError("analyze needs at least two period files");
    const ThresholdSpec threshold = parse_threshold(config.threshold);
    const Delimiter delimiter = parse_delimiter(config.delimiter);
    const Alignment alignment = parse_alignment(config.alignment);

    std::vector<DirectedEdgeList> periods;
    std::vector<std::string> labels;
    for (const auto& path : config.periods) {
        auto parsed = read_edge_list_file(path, delimiter);
        for (const auto& d : parsed.diagnostics)
            log << "warning: " << path << ':' << d.line << ": " << d.reason << ", line skipped\n";
        parsed.list.label = fs::path(path).stem().string();
        labels.push_back(parsed.list.label);
        periods.push_back(std::move(parsed.list));
    }

    const fs::path dir(config.output);
    prepare_dir(dir);
    write_config(dir, "analyze", config);

    const auto hill = hill_checks(periods, config.hill_k);
    for (const auto& h : hill)
        if (!h.in_range)
            log << "warning: period " << h.period << " Hill tail index " << format_double(h.alpha) << " ("
                << h.note << ")\n";
    {
        auto file = open_output(dir / "hill.csv");
        write_hill_csv(file, hill);
    }

    const auto series = utd_series(periods, threshold);
    {
        auto file = open_output(dir / "utd_series.csv");
        write_series_csv(file, series);
    }
    for (const auto& e : series) {
        out << e.pair << ' ' << format_double(e.estimate.lambda_hat) << (e.degenerate ? " degenerate" : "") << '\n';
        if (e.degenerate) log << "warning: pair " << e.pair << " is degenerate: " << e.note << '\n';
    }

    if (config.prices.empty() || !fs::exists(config.prices)) {
        log << "notice: "
            << (config.prices.empty() ? std::string("no price CSV given")
                                      : "price CSV " + config.prices + " not found")
            << "; correlation skipped\n";
        return;
    }
    const PriceSeries prices = read_price_csv(config.prices);
    const auto rows = align_series(series, labels, prices, alignment);
    {
        auto file = open_output(dir / "correlation.csv");
        write_aligned_csv(file, rows);
    }
    std::vector<double> lambda, shrink;
    for (const auto& r : rows) {
        lambda.push_back(r.lambda);
        shrink.push_back(r.shrinkage);
    }
    json result{{"alignment", to_string(alignment)}, {"pairs", rows.size()}, {"correlation", nullptr}};
    try {
        const double rho = correlate_series(lambda, shrink);
        result["correlation"] = rho;
        out << "correlation " << format_double(rho) << '\n';
    } catch (const DomainError& e) {
        log << "notice: correlation undefined: " << e.what() << '\n';
    }
    open_output(dir / "correlation.json") << result.dump(2) << '\n';
}

void cmd_truth(TruthConfig config, std::ostream& out, std::ostream& log) {
    std::vector<DependenceScenario> scenarios;
    for (const auto& s : config.scenarios) scenarios.push_back(parse_scenario(s));
    if (!(config.precision > 0.0)) throw ParameterError("precision must be positive");
    std::optional<Rng> rng;
    if (config.cross_check) rng.emplace(ensure_seed(config.seed, log));

    out << (config.cross_check ? "scenario,truth,monte_carlo,std_error,agree\n" : "scenario,truth\n");
    for (const auto& scenario : scenarios) {
        const std::string name = '"' + to_string(scenario) + '"';
        if (const auto* polar = std::get_if<PolarMrv>(&scenario.variant)) {
            if (config.cross_check) {
                MonteCarloOptions options;
                options.draws = config.draws;
                const auto check = mrv_cross_check(polar->theta_law, scenario.marginal, config.precision, *rng, options);
                out << name << ',' << format_double(check.quadrature) << ','
                    << format_double(check.monte_carlo.lambda) << ',' << format_double(check.monte_carlo.std_error)
                    << ',' << (check.agree ? 1 : 0) << '\n';
                continue;
            }
            out << name << ',' << format_double(mrv_true_utd(polar->theta_law, scenario.marginal, config.precision))
                << '\n';
            continue;
        }
        out << name << ',' << format_double(true_utd(scenario)) << (config.cross_check ? ",,," : "") << '\n';
    }
}

}  // namespace mlutd

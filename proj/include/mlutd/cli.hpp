#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

namespace mlutd {

struct SimulateConfig {
    std::string scenario = "gumbel:theta=2";
    std::size_t nodes = 1000;
    std::string threshold = "top:100";
    std::string backend = "auto";
    std::optional<std::uint64_t> seed;
    std::string output = "simulate_out";
    bool edges = false;
};

struct ReplicateConfig {
    std::vector<std::string> scenarios = {"gumbel:theta=2"};
    std::vector<std::size_t> sizes = {1000, 10000, 20000};
    std::string threshold = "quantile:0.995";
    std::size_t replications = 200;
    std::string backend = "auto";
    std::optional<std::uint64_t> seed;
    std::string output = "replicate_out";
    bool scatter = true;
};

struct AnalyzeConfig {
    std::vector<std::string> periods;  // edge-list files in time order
    std::string prices;                // optional price CSV
    std::string threshold = "top:100";
    std::string delimiter = "auto";
    std::string alignment = "second";
    std::size_t hill_k = 0;  // 0 selects ceil(0.05 N)
    std::string output = "analyze_out";
};

struct TruthConfig {
    std::vector<std::string> scenarios = {"gumbel:theta=2"};
    double precision = 1e-6;
    bool cross_check = false;
    std::size_t draws = 10'000'000;
    std::optional<std::uint64_t> seed;
};

// Keys match the field names; "seed" is null when unset. Unknown keys are rejected.
void to_json(nlohmann::json& j, const SimulateConfig& c);
void from_json(const nlohmann::json& j, SimulateConfig& c);
void to_json(nlohmann::json& j, const ReplicateConfig& c);
void from_json(const nlohmann::json& j, ReplicateConfig& c);
void to_json(nlohmann::json& j, const AnalyzeConfig& c);
void from_json(const nlohmann::json& j, AnalyzeConfig& c);
void to_json(nlohmann::json& j, const TruthConfig& c);
void from_json(const nlohmann::json& j, TruthConfig& c);

/// Defaults, overlaid by the config file (if any), overlaid by flag values.
/// A "command" key in the file must match `command` when present.
nlohmann::json merge_config(const std::string& command, const nlohmann::json& defaults,
                            const std::string& config_path, const nlohmann::json& overrides);

/// Fills a missing seed from system entropy and reports it on `log`.
std::uint64_t ensure_seed(std::optional<std::uint64_t>& seed, std::ostream& log);

/// Each command writes config.json (fully resolved) next to its outputs and
/// throws on fatal errors. Notices and warnings go to `log`.
void cmd_simulate(SimulateConfig config, std::ostream& out, std::ostream& log);
void cmd_replicate(ReplicateConfig config, std::size_t workers, std::ostream& out, std::ostream& log);
void cmd_analyze(const AnalyzeConfig& config, std::ostream& out, std::ostream& log);
void cmd_truth(TruthConfig config, std::ostream& out, std::ostream& log);

}  // namespace mlutd

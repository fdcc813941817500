#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "mlutd/mirg.hpp"
#include "mlutd/random.hpp"
#include "mlutd/tailstats.hpp"
#include "mlutd/weights.hpp"

namespace mlutd {

/// Replication grid: every scenario is run at every size.
struct ExperimentPlan {
    std::vector<DependenceScenario> scenarios;
    std::vector<std::size_t> sizes;
    ThresholdSpec threshold = TopCount{100};
    std::size_t replications = 200;
    Backend backend = Backend::Auto;
    std::uint64_t master_seed = 0;

    void validate() const;
};

struct ReplicationResult {
    UtdEstimate lambda_weights;
    UtdEstimate lambda_degrees;

    friend bool operator==(const ReplicationResult&, const ReplicationResult&) = default;
};

/// One pass of the simulation: weights -> graph -> degrees -> both estimates.
ReplicationResult run_replication(const DependenceScenario& scenario, std::size_t nodes,
                                  const ThresholdSpec& threshold, Backend backend, Rng& rng);

/// Generator for replication `rep` of cell (scenario_index, size_index).
/// Depends only on these indices and the master seed, never on scheduling.
Rng replication_rng(std::uint64_t master_seed, std::size_t scenario_index, std::size_t size_index,
                    std::size_t rep);

struct CellReport {
    std::string scenario;
    std::size_t nodes = 0;
    std::size_t t_n = 0;
    double truth = 0.0;
    ReplicationSummary weights;
    ReplicationSummary degrees;
    std::size_t degenerate_count = 0;  // replications with a degenerate degree estimate
    bool flagged = false;              // more than 10% degenerate
    double wall_seconds = 0.0;
    std::vector<ReplicationResult> replications;
};

struct ExperimentReport {
    std::vector<CellReport> cells;  // scenario-major, then size

    const CellReport& cell(std::size_t scenario_index, std::size_t size_index, std::size_t size_count) const {
        return cells.at(scenario_index * size_count + size_index);
    }
};

/// Runs the plan on up to `workers` threads. The report is identical for any worker count.
ExperimentReport run_plan(const ExperimentPlan& plan, std::size_t workers = 1);

/// scenario,N,t_n,truth,mean_w,mean_d,mse_w,mse_d,scaledvar_w,scaledvar_d,n_reps,degenerate_count
void write_report_csv(std::ostream& out, const ExperimentReport& report);
/// scenario,N,target,mse (target is "weights" or "degrees")
void write_mse_curve_csv(std::ostream& out, const ExperimentReport& report);
/// rep,lambda_w,lambda_d for one cell
void write_scatter_csv(std::ostream& out, const CellReport& cell);

/// Filesystem-safe name for a cell, e.g. "gumbel_theta_2_N20000".
std::string cell_slug(const CellReport& cell);

}  // namespace mlutd

#include "mlutd/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <ostream>
#include <thread>

#include "format.hpp"

namespace mlutd {

using detail::format_double;

void ExperimentPlan::validate() const {
    if (scenarios.empty()) throw ParameterError("plan has no scenarios");
    if (sizes.empty()) throw ParameterError("plan has no sizes");
    if (replications < 1) throw ParameterError("plan needs at least one replication");
    for (const auto& s : scenarios) s.validate();
    for (std::size_t n : sizes) resolve_top_count(threshold, n);
}

ReplicationResult run_replication(const DependenceScenario& scenario, std::size_t nodes,
                                  const ThresholdSpec& threshold, Backend backend, Rng& rng) {
    const WeightMatrix weights = sample_weights(scenario, nodes, rng);
    const MultilayerDegrees deg = sample_degrees(weights, backend, rng);
    ReplicationResult out;
    out.lambda_weights = utd_estimate(weights.values.column(0), weights.values.column(1), threshold);
    out.lambda_degrees = utd_estimate(deg.values.column(0), deg.values.column(1), threshold);
    return out;
}

Rng replication_rng(std::uint64_t master_seed, std::size_t scenario_index, std::size_t size_index,
                    std::size_t rep) {
    return Rng(master_seed).split(scenario_index).split(size_index).split(rep);
}

namespace {

ReplicationSummary summarize(const std::vector<double>& values, double truth, std::size_t t_n) {
    if (values.size() >= 2) return replication_summary(values, truth, t_n);
    ReplicationSummary s;
    s.count = values.size();
    s.mean = values.front();
    s.mse = (values.front() - truth) * (values.front() - truth);
    s.variance = std::numeric_limits<double>::quiet_NaN();
    s.scaled_variance = s.variance;
    return s;
}

}  // namespace

ExperimentReport run_plan(const ExperimentPlan& plan, std::size_t workers) {
    plan.validate();
    const std::size_t n_scen = plan.scenarios.size();
    const std::size_t n_size = plan.sizes.size();
    const std::size_t reps = plan.replications;
    const std::size_t cells = n_scen * n_size;
    const std::size_t tasks = cells * reps;

    std::vector<ReplicationResult> results(tasks);
    std::vector<double> seconds(tasks, 0.0);
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;

    auto worker = [&] {
        while (true) {
            const std::size_t task = next.fetch_add(1);
            if (task >= tasks) return;
            const std::size_t cell = task / reps;
            const std::size_t rep = task % reps;
            const std::size_t s = cell / n_size;
            const std::size_t z = cell % n_size;
            try {
                const auto start = std::chrono::steady_clock::now();
                Rng rng = replication_rng(plan.master_seed, s, z, rep);
                results[task] = run_replication(plan.scenarios[s], plan.sizes[z], plan.threshold, plan.backend, rng);
                seconds[task] = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
                next.store(tasks);
                return;
            }
        }
    };

    workers = std::clamp<std::size_t>(workers, 1, tasks);
    if (workers == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
    }
    if (failure) std::rethrow_exception(failure);

    ExperimentReport report;
    report.cells.reserve(cells);
    for (std::size_t s = 0; s < n_scen; ++s) {
        const double truth = true_utd(plan.scenarios[s]);
        for (std::size_t z = 0; z < n_size; ++z) {
            const std::size_t cell = s * n_size + z;
            CellReport c;
            c.scenario = to_string(plan.scenarios[s]);
            c.nodes = plan.sizes[z];
            c.t_n = resolve_top_count(plan.threshold, c.nodes);
            c.truth = truth;
            c.replications.assign(results.begin() + static_cast<std::ptrdiff_t>(cell * reps),
                                  results.begin() + static_cast<std::ptrdiff_t>((cell + 1) * reps));
            std::vector<double> lw, ld;
            for (std::size_t r = 0; r < reps; ++r) {
                const auto& rr = c.replications[r];
                lw.push_back(rr.lambda_weights.lambda_hat);
                ld.push_back(rr.lambda_degrees.lambda_hat);
                if (rr.lambda_weights.degenerate || rr.lambda_degrees.degenerate) ++c.degenerate_count;
                c.wall_seconds += seconds[cell * reps + r];
            }
            c.weights = summarize(lw, truth, c.t_n);
            c.degrees = summarize(ld, truth, c.t_n);
            c.flagged = 10 * c.degenerate_count > reps;
            report.cells.push_back(std::move(c));
        }
    }
    return report;
}

void write_report_csv(std::ostream& out, const ExperimentReport& report) {
    out << "scenario,N,t_n,truth,mean_w,mean_d,mse_w,mse_d,scaledvar_w,scaledvar_d,n_reps,degenerate_count\n";
    for (const auto& c : report.cells) {
        out << '"' << c.scenario << "\"," << c.nodes << ',' << c.t_n << ',' << format_double(c.truth) << ','
            << format_double(c.weights.mean) << ',' << format_double(c.degrees.mean) << ','
            << format_double(c.weights.mse) << ',' << format_double(c.degrees.mse) << ','
            << format_double(c.weights.scaled_variance) << ',' << format_double(c.degrees.scaled_variance) << ','
            << c.weights.count << ',' << c.degenerate_count << '\n';
    }
}

void write_mse_curve_csv(std::ostream& out, const ExperimentReport& report) {
    out << "scenario,N,target,mse\n";
    for (const auto& c : report.cells) {
        out << '"' << c.scenario << "\"," << c.nodes << ",weights," << format_double(c.weights.mse) << '\n';
        out << '"' << c.scenario << "\"," << c.nodes << ",degrees," << format_double(c.degrees.mse) << '\n';
    }
}

void write_scatter_csv(std::ostream& out, const CellReport& cell) {
    out << "rep,lambda_w,lambda_d\n";
    for (std::size_t r = 0; r < cell.replications.size(); ++r) {
        out << r << ',' << format_double(cell.replications[r].lambda_weights.lambda_hat) << ','
            << format_double(cell.replications[r].lambda_degrees.lambda_hat) << '\n';
    }
}

std::string cell_slug(const CellReport& cell) {
    std::string slug;
    for (char ch : cell.scenario) {
        const bool keep = (ch >= 'a' && ch <= 'z') || (ch >= 'A' && ch <= 'Z') || (ch >= '0' && ch <= '9') || ch == '.';
        slug += keep ? ch : '_';
    }
    return slug + "_N" + std::to_string(cell.nodes);
}

}  // namespace mlutd

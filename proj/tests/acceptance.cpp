// Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <unistd.h>

#include "mlutd/cli.hpp"
#include "mlutd/harness.hpp"
#include "mlutd/ingestion.hpp"
#include "mlutd/mirg.hpp"
#include "mlutd/tailstats.hpp"
#include "mlutd/weights.hpp"
#include "support/oracles.hpp"
#include "support/synthetic.hpp"

using namespace mlutd;
namespace fs = std::filesystem;

namespace {

int failures = 0;

void detail(const char* fmt, auto... args) {
    std::printf("    ");
    std::printf(fmt, args...);
    std::printf("\n");
}

void verdict(int id, bool ok, const std::string& title, double seconds) {
    std::printf("[%s] criterion %d: %s (%.1f s)\n", ok ? "PASS" : "FAIL", id, title.c_str(), seconds);
    std::fflush(stdout);
    if (!ok) ++failures;
}

double since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

bool within(double value, double target, double tol) { return std::abs(value - target) <= tol; }

constexpr std::uint64_t kSeed = 20240917;

// Published reference means of the degree-based estimate (t_N = 100, 1000 replications).
struct GridRow {
    const char* scenario;
    double truth;
    std::map<std::size_t, double> degree_mean;
};

const std::vector<GridRow> kGumbelRows = {
    {"gumbel:theta=1", 0.0, {{1000, 0.0973}, {10000, 0.0103}, {20000, 0.0050}}},
    {"gumbel:theta=1.5", 0.4126, {{1000, 0.4486}, {10000, 0.4151}, {20000, 0.4128}}},
    {"gumbel:theta=2", 0.5858, {{1000, 0.6012}, {10000, 0.5870}, {20000, 0.5859}}},
    {"gumbel:theta=10", 0.9282, {{1000, 0.8832}, {10000, 0.9189}, {20000, 0.9221}}},
};

const std::vector<GridRow> kPolarRows = {
    {"polar:bernoulli=0.5", 0.0, {{1000, 0.0}, {10000, 0.0}, {20000, 0.0}}},
    {"polar:beta=0.5/0.5", 0.3316, {{1000, 0.3212}, {10000, 0.3288}, {20000, 0.3279}}},
    {"polar:scaledbeta=0.1/0.1/0.4/0.6", 0.8061, {{1000, 0.7811}, {10000, 0.8050}, {20000, 0.8046}}},
    {"polar:constant=0.5", 1.0, {{1000, 0.8873}, {10000, 0.9613}, {20000, 0.9715}}},
};

const std::vector<std::size_t> kSizes = {1000, 10000, 20000};

void criterion_gumbel_truth() {
    const auto start = std::chrono::steady_clock::now();
    bool ok = true;
    for (const auto& row : kGumbelRows) {
        const double theta = std::get<GumbelCopula>(parse_scenario(row.scenario).variant).theta;
        const double v = gumbel_true_utd(theta);
        const bool cell = within(v, row.truth, 5e-5);
        ok = ok && cell;
        detail("theta=%-4g lambda_U=%.6f reference=%.4f %s", theta, v, row.truth, cell ? "ok" : "MISS");
    }
    verdict(1, ok, "Gumbel closed-form tail dependence within 5e-5", since(start));
}

void criterion_mrv_truth() {
    const auto start = std::chrono::steady_clock::now();
    bool ok = true;
    Rng rng(kSeed);
    for (const auto& row : kPolarRows) {
        const auto s = parse_scenario(row.scenario);
        const auto& law = std::get<PolarMrv>(s.variant).theta_law;
        const double quad = mrv_true_utd(law, s.marginal);
        bool agree = false;
        double mc = NAN, se = NAN;
        try {
            const auto check = mrv_cross_check(law, s.marginal, 0.005, rng);
            mc = check.monte_carlo.lambda;
            se = check.monte_carlo.std_error;
            agree = check.agree;
        } catch (const std::exception& e) {
            detail("%s: Monte Carlo route failed: %s", row.scenario, e.what());
        }
        const bool cell = within(quad, row.truth, 0.005) && agree;
        ok = ok && cell;
        detail("%-34s quadrature=%.5f monte_carlo=%.5f (se %.1e) reference=%.4f %s", row.scenario, quad, mc, se,
               row.truth, cell ? "ok" : "MISS");
    }
    verdict(2, ok, "polar tail dependence: quadrature within 0.005 of reference, Monte Carlo agrees within 0.005",
            since(start));
}

ExperimentReport run_grid(double& seconds) {
    const auto start = std::chrono::steady_clock::now();
    ExperimentPlan plan;
    for (const auto* rows : {&kGumbelRows, &kPolarRows})
        for (const auto& row : *rows) plan.scenarios.push_back(parse_scenario(row.scenario));
    plan.sizes = kSizes;
    plan.threshold = TopCount{100};
    plan.replications = 200;
    plan.backend = Backend::FastIdentity;
    plan.master_seed = kSeed;
    const auto report = run_plan(plan, std::max(1u, std::thread::hardware_concurrency()));
    seconds = since(start);
    std::printf("replication grid: %zu cells x 200 replications in %.1f s\n", report.cells.size(), seconds);
    for (const auto& c : report.cells)
        detail("%-34s N=%-5zu truth=%.4f mean_w=%.4f mean_d=%.4f mse_d=%.5f tvar_w=%.4f tvar_d=%.4f degenerate=%zu",
               c.scenario.c_str(), c.nodes, c.truth, c.weights.mean, c.degrees.mean, c.degrees.mse,
               c.weights.scaled_variance, c.degrees.scaled_variance, c.degenerate_count);
    return report;
}

const CellReport& find_cell(const ExperimentReport& r, const std::string& scenario, std::size_t n) {
    const std::string canonical = to_string(parse_scenario(scenario));
    for (const auto& c : r.cells)
        if (c.scenario == canonical && c.nodes == n) return c;
    throw std::runtime_error("missing cell " + scenario);
}

void criterion_gumbel_grid(const ExperimentReport& r, double grid_seconds) {
    bool ok = true;
    for (const auto& row : kGumbelRows)
        for (std::size_t n : {1000u, 20000u}) {
            const double m = find_cell(r, row.scenario, n).degrees.mean;
            const double ref = row.degree_mean.at(n);
            const bool cell = within(m, ref, 0.02);
            ok = ok && cell;
            detail("%-18s N=%-5zu mean_d=%.4f reference=%.4f diff=%+.4f %s", row.scenario, n, m, ref, m - ref,
                   cell ? "ok" : "MISS");
        }
    verdict(3, ok && grid_seconds <= 1200.0, "Gumbel grid: degree UTD means within 0.02 of reference (N = 1000, 20000)",
            grid_seconds);
}

void criterion_polar_grid(const ExperimentReport& r) {
    bool ok = true;
    for (const auto& row : kPolarRows) {
        const double m = find_cell(r, row.scenario, 20000).degrees.mean;
        const double ref = row.degree_mean.at(20000);
        const bool cell = within(m, ref, 0.02);
        ok = ok && cell;
        detail("%-34s N=20000 mean_d=%.4f reference=%.4f diff=%+.4f %s", row.scenario, m, ref, m - ref,
               cell ? "ok" : "MISS");
    }
    bool exact = true;
    for (std::size_t n : kSizes) {
        for (const auto& rep : find_cell(r, "polar:constant=0.5", n).replications)
            exact = exact && rep.lambda_weights.lambda_hat == 1.0;
        for (const auto& rep : find_cell(r, "polar:bernoulli=0.5", n).replications)
            exact = exact && rep.lambda_weights.lambda_hat == 0.0;
    }
    detail("weight UTD: constant == 1 and Bernoulli == 0 in every replication: %s", exact ? "ok" : "MISS");
    ok = ok && exact;
    verdict(4, ok, "polar grid: degree UTD means within 0.02 at N = 20000; exact weight UTD for constant/Bernoulli",
            0.0);
}

void criterion_mse(const ExperimentReport& r) {
    bool ok = true;
    for (const auto* rows : {&kGumbelRows, &kPolarRows})
        for (const auto& row : *rows) {
            const auto& small = find_cell(r, row.scenario, 1000);
            const auto& large = find_cell(r, row.scenario, 10000);
            if (small.degrees.mse == 0.0 && large.degrees.mse == 0.0) {
                detail("%-34s mse_d identically 0 (degenerate scenario, skipped)", row.scenario);
                continue;
            }
            const bool cell = large.degrees.mse < small.degrees.mse;
            ok = ok && cell;
            detail("%-34s mse_d N=1000 %.6f > N=10000 %.6f %s", row.scenario, small.degrees.mse, large.degrees.mse,
                   cell ? "ok" : "MISS");
        }
    verdict(5, ok, "degree UTD MSE decreases from N = 1000 to N = 10000", 0.0);
}

void criterion_variance(const ExperimentReport& r) {
    const auto& gumbel = find_cell(r, "gumbel:theta=2", 20000);
    const auto& strong = find_cell(r, "polar:scaledbeta=0.1/0.1/0.4/0.6", 20000);
    bool ok = gumbel.degrees.scaled_variance >= 0.10 && gumbel.degrees.scaled_variance <= 0.28;
    detail("gumbel:theta=2 t_N Var(degree UTD) = %.4f in [0.10, 0.28]: %s", gumbel.degrees.scaled_variance,
           ok ? "ok" : "MISS");
    const bool s_ok = strong.degrees.scaled_variance >= 0.05 && strong.degrees.scaled_variance <= 0.15;
    detail("strong polar t_N Var(degree UTD) = %.4f in [0.05, 0.15]: %s", strong.degrees.scaled_variance,
           s_ok ? "ok" : "MISS");
    ok = ok && s_ok;
    for (const auto& c : r.cells) {
        if (c.nodes != 20000) continue;
        const double gap = std::abs(c.degrees.scaled_variance - c.weights.scaled_variance);
        const bool cell = gap <= 0.05;
        ok = ok && cell;
        detail("%-34s |t_N Var_d - t_N Var_w| = %.4f %s", c.scenario.c_str(), gap, cell ? "ok" : "MISS");
    }
    verdict(6, ok, "scaled variances at N = 20000 in range and weight/degree versions within 0.05", 0.0);
}

void criterion_backends() {
    const auto start = std::chrono::steady_clock::now();
    const std::size_t n = 50, reps = 100000;
    WeightMatrix w;
    w.values = ColumnMatrix<double>(n, 2);
    const ParetoTail tail{1.1, 5.0};
    for (std::size_t i = 0; i < n; ++i) {
        const double u = (static_cast<double>(i) + 0.5) / static_cast<double>(n);
        w.values(i, 0) = pareto_quantile(u, tail);
        w.values(n - 1 - i, 1) = pareto_quantile(u, tail);
    }
    std::map<std::int64_t, std::pair<double, double>> hist;
    std::vector<std::vector<double>> loops(4, std::vector<double>(reps));
    Rng pairwise_rng(kSeed + 1), fast_rng(kSeed + 2);
    for (std::size_t r = 0; r < reps; ++r) {
        const auto gp = build_graph(w, Backend::Pairwise, pairwise_rng);
        const auto gf = build_graph(w, Backend::FastIdentity, fast_rng);
        const auto dp = degrees(gp), df = degrees(gf);
        const std::size_t node = r % n;  // one node per replication keeps the histogram counts independent
        for (std::size_t l = 0; l < 2; ++l) {
            hist[dp.values(node, l)].first += 1;
            hist[df.values(node, l)].second += 1;
            for (int b = 0; b < 2; ++b) {
                double s = 0.0;
                for (const auto& e : (b == 0 ? gp : gf).layers[l])
                    if (e.i == e.j) s += static_cast<double>(e.multiplicity);
                loops[2 * static_cast<std::size_t>(b) + l][r] = s;
            }
        }
    }
    std::vector<double> ha, hb;
    for (const auto& [k, v] : hist) {
        ha.push_back(v.first);
        hb.push_back(v.second);
    }
    const auto chi = oracle::chi_square_two_sample(ha, hb);
    detail("degree histogram chi-square = %.2f, df = %zu, 1%% critical = %.2f", chi.statistic, chi.df, chi.critical);
    bool ok = chi.accept;
    for (std::size_t l = 0; l < 2; ++l) {
        double sq = 0.0, total = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            sq += w.values(i, l) * w.values(i, l);
            total += w.values(i, l);
        }
        for (int b = 0; b < 2; ++b) {
            const auto& s = loops[2 * static_cast<std::size_t>(b) + l];
            const double m = oracle::mean(s), se = oracle::std_error(s);
            const bool cell = std::abs(m - sq / total) <= 3.0 * se;
            ok = ok && cell;
            detail("layer %zu %-8s self-loop mean %.4f vs sum W^2/T %.4f (se %.4f) %s", l + 1,
                   b == 0 ? "pairwise" : "fast", m, sq / total, se, cell ? "ok" : "MISS");
        }
    }
    const double secs = since(start);
    verdict(7, ok && secs < 300.0, "pairwise and fast backends agree (chi-square 1%, self-loop means)", secs);
}

void criterion_estimator() {
    const auto start = std::chrono::steady_clock::now();
    const std::vector<double> down{5, 4, 3, 2, 1}, up{1, 2, 3, 4, 5};
    const std::vector<int> s1{10, 9, 8, 1, 1, 1, 1, 1, 1, 1}, s2{10, 1, 8, 9, 1, 1, 1, 1, 1, 1};
    const double co = utd_estimate(std::span<const double>(down), std::span<const double>(down), TopCount{2}).lambda_hat;
    const double anti = utd_estimate(std::span<const double>(down), std::span<const double>(up), TopCount{2}).lambda_hat;
    const double tie = utd_estimate(std::span<const int>(s1), std::span<const int>(s2), TopCount{3}).lambda_hat;
    detail("comonotone %.17g, anti-monotone %.17g, tie example %.17g", co, anti, tie);
    verdict(8, co == 1.0 && anti == 0.0 && tie == 2.0 / 3.0, "hand-count estimator examples exact", since(start));
}

void criterion_pipeline() {
    const auto start = std::chrono::steady_clock::now();
    const fs::path dir = fs::temp_directory_path() / ("mlutd_acceptance_" + std::to_string(::getpid()));
    fs::remove_all(dir);
    fs::create_directories(dir);
    const auto periods = synthetic::reply_periods(11, 600, 5000, kSeed);
    AnalyzeConfig config;
    bool ok = true;
    for (const auto& p : periods) {
        const auto path = (dir / (p.label + ".txt")).string();
        std::ofstream out(path);
        write_edge_list(out, p);
        config.periods.push_back(path);
        std::int64_t total = 0;
        for (auto d : period_degrees(p)) total += d;
        ok = ok && total == 2 * static_cast<std::int64_t>(p.edges.size());
    }
    for (std::size_t m = 0; m + 1 < periods.size(); ++m) {
        const auto pd = paired_degrees(periods[m], periods[m + 1]);
        std::int64_t a = 0, b = 0;
        for (auto d : pd.degrees_1) a += d;
        for (auto d : pd.degrees_2) b += d;
        ok = ok && a == 2 * static_cast<std::int64_t>(pd.retained_edges_1) &&
             b == 2 * static_cast<std::int64_t>(pd.retained_edges_2);
    }
    detail("degree conservation on every period and intersection: %s", ok ? "ok" : "MISS");
    config.output = (dir / "out").string();
    std::ostringstream out, log;
    cmd_analyze(config, out, log);
    std::ifstream series(dir / "out" / "utd_series.csv");
    std::size_t rows = 0;
    for (std::string line; std::getline(series, line);) ++rows;
    --rows;  // header
    detail("UTD rows from 11 periods: %zu", rows);
    ok = ok && rows == 10;

    std::istringstream csv("period,initial_price,final_price\na,100,82\nb,100,130\n");
    const auto prices = parse_price_csv(csv, "inline");
    const double s1 = shrinkage_ratio(prices, "a"), s2 = shrinkage_ratio(prices, "b");
    detail("shrinkage ratios %.15g and %.15g", s1, s2);
    ok = ok && within(s1, 0.18, 1e-12) && within(s2, -0.30, 1e-12);
    fs::remove_all(dir);
    verdict(9, ok, "period pipeline: 11 files give 10 UTD rows, degree conservation, shrinkage examples",
            since(start));
}

}  // namespace

int main() {
    criterion_gumbel_truth();
    criterion_mrv_truth();
    double grid_seconds = 0.0;
    const auto report = run_grid(grid_seconds);
    criterion_gumbel_grid(report, grid_seconds);
    criterion_polar_grid(report);
    criterion_mse(report);
    criterion_variance(report);
    criterion_backends();
    criterion_estimator();
    criterion_pipeline();
    std::printf("%d criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}

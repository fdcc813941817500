#include "doctest.h"

#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "mlutd/errors.hpp"
#include "mlutd/harness.hpp"

using namespace mlutd;

namespace {

ExperimentPlan small_plan() {
    ExperimentPlan plan;
    plan.scenarios = {parse_scenario("gumbel:theta=2"), parse_scenario("polar:beta=0.5/0.5")};
    plan.sizes = {300, 600};
    plan.threshold = TopCount{20};
    plan.replications = 12;
    plan.backend = Backend::FastIdentity;
    plan.master_seed = 2024;
    return plan;
}

std::string report_csv(const ExperimentReport& r) {
    std::ostringstream out;
    write_report_csv(out, r);
    write_mse_curve_csv(out, r);
    for (const auto& c : r.cells) write_scatter_csv(out, c);
    return out.str();
}

}  // namespace

TEST_CASE("full asymptotic dependence gives weight UTD exactly 1") {
    const auto s = parse_scenario("polar:constant=0.5");
    for (std::size_t rep = 0; rep < 20; ++rep) {
        Rng rng = replication_rng(5, 0, 0, rep);
        CHECK(run_replication(s, 1000, TopCount{50}, Backend::FastIdentity, rng).lambda_weights.lambda_hat == 1.0);
    }
}

TEST_CASE("asymptotic independence gives degree UTD exactly 0") {
    const auto s = parse_scenario("polar:bernoulli=0.5");
    for (std::size_t rep = 0; rep < 20; ++rep) {
        Rng rng = replication_rng(6, 0, 0, rep);
        const auto r = run_replication(s, 1000, TopCount{50}, Backend::Auto, rng);
        CHECK(r.lambda_degrees.lambda_hat == 0.0);
        CHECK(r.lambda_weights.lambda_hat == 0.0);
    }
}

TEST_CASE("replications are reproducible") {
    const auto s = parse_scenario("gumbel:theta=1.5");
    for (Backend b : {Backend::Pairwise, Backend::FastIdentity}) {
        Rng a = replication_rng(9, 1, 2, 3), c = replication_rng(9, 1, 2, 3);
        CHECK(run_replication(s, 400, TopCount{20}, b, a) == run_replication(s, 400, TopCount{20}, b, c));
    }
    CHECK(replication_rng(9, 1, 2, 3)() != replication_rng(9, 1, 2, 4)());
    CHECK(replication_rng(9, 1, 2, 3)() != replication_rng(9, 2, 1, 3)());
}

TEST_CASE("two-replication plan equals hand aggregation") {
    ExperimentPlan plan;
    plan.scenarios = {parse_scenario("gumbel:theta=2")};
    plan.sizes = {500};
    plan.threshold = TopCount{25};
    plan.replications = 2;
    plan.backend = Backend::FastIdentity;
    plan.master_seed = 77;
    const auto report = run_plan(plan);
    REQUIRE(report.cells.size() == 1);

    std::vector<double> w, d;
    for (std::size_t rep = 0; rep < 2; ++rep) {
        Rng rng = replication_rng(77, 0, 0, rep);
        const auto r = run_replication(plan.scenarios[0], 500, plan.threshold, plan.backend, rng);
        CHECK(report.cells[0].replications[rep] == r);
        w.push_back(r.lambda_weights.lambda_hat);
        d.push_back(r.lambda_degrees.lambda_hat);
    }
    const double truth = gumbel_true_utd(2.0);
    const auto sw = replication_summary(w, truth, 25), sd = replication_summary(d, truth, 25);
    const auto& cell = report.cells[0];
    CHECK(cell.truth == truth);
    CHECK(cell.t_n == 25);
    CHECK(cell.weights.mean == sw.mean);
    CHECK(cell.weights.mse == sw.mse);
    CHECK(cell.weights.scaled_variance == sw.scaled_variance);
    CHECK(cell.degrees.mean == sd.mean);
    CHECK(cell.degrees.mse == sd.mse);
    CHECK(cell.degrees.scaled_variance == sd.scaled_variance);
}

TEST_CASE("report does not depend on the worker count") {
    const auto plan = small_plan();
    const std::string one = report_csv(run_plan(plan, 1));
    CHECK(report_csv(run_plan(plan, 3)) == one);
    CHECK(report_csv(run_plan(plan, 8)) == one);
}

TEST_CASE("bias-variance identity holds per cell") {
    const auto report = run_plan(small_plan(), 2);
    CHECK(report.cells.size() == 4);
    for (const auto& c : report.cells) {
        for (const auto* s : {&c.weights, &c.degrees}) {
            const double n = static_cast<double>(s->count);
            const double bias2 = (s->mean - c.truth) * (s->mean - c.truth);
            CHECK(std::abs(s->mse - ((n - 1) / n * s->variance + bias2)) < 1e-10);
            CHECK(s->mse >= bias2 - 1e-12);
        }
    }
    const auto& cell = report.cell(1, 0, 2);
    CHECK(cell.scenario == "polar:beta=0.5/0.5");
    CHECK(cell.nodes == 300);
}

TEST_CASE("single-replication plan") {
    auto plan = small_plan();
    plan.replications = 1;
    const auto report = run_plan(plan);
    for (const auto& c : report.cells) {
        CHECK(c.replications.size() == 1);
        CHECK(c.weights.count == 1);
        CHECK(std::isnan(c.degrees.variance));
    }
    std::ostringstream out;
    write_report_csv(out, report);
    CHECK(out.str().find(",nan,") != std::string::npos);
}

TEST_CASE("mostly degenerate cells are flagged") {
    ExperimentPlan plan;
    plan.scenarios = {parse_scenario("gumbel:theta=2,k=0.0001")};
    plan.sizes = {50};
    plan.threshold = TopCount{10};
    plan.replications = 10;
    plan.master_seed = 1;
    const auto report = run_plan(plan);
    CHECK(report.cells[0].degenerate_count > 1);
    CHECK(report.cells[0].flagged);
    CHECK_FALSE(run_plan(small_plan()).cells[0].flagged);
}

TEST_CASE("plan validation") {
    auto plan = small_plan();
    plan.replications = 0;
    CHECK_THROWS_AS(plan.validate(), ParameterError);
    plan = small_plan();
    plan.sizes = {20};
    CHECK_THROWS_AS(plan.validate(), DomainError);
    plan = small_plan();
    plan.scenarios.clear();
    CHECK_THROWS_AS(run_plan(plan), ParameterError);
}

TEST_CASE("CSV schemas") {
    auto plan = small_plan();
    plan.replications = 2;
    plan.sizes = {300};
    const auto report = run_plan(plan);
    std::ostringstream rep, mse, sc;
    write_report_csv(rep, report);
    write_mse_curve_csv(mse, report);
    write_scatter_csv(sc, report.cells[0]);
    CHECK(rep.str().rfind("scenario,N,t_n,truth,mean_w,mean_d,mse_w,mse_d,scaledvar_w,scaledvar_d,n_reps,"
                          "degenerate_count\n\"gumbel:theta=2\",300,20,",
                          0) == 0);
    CHECK(mse.str().rfind("scenario,N,target,mse\n\"gumbel:theta=2\",300,weights,", 0) == 0);
    CHECK(mse.str().find("\"gumbel:theta=2\",300,degrees,") != std::string::npos);
    CHECK(sc.str().rfind("rep,lambda_w,lambda_d\n0,", 0) == 0);
    CHECK(cell_slug(report.cells[0]) == "gumbel_theta_2_N300");
    CHECK(cell_slug(report.cells[1]) == "polar_beta_0.5_0.5_N300");
}

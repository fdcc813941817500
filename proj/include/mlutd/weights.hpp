#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <variant>

#include "mlutd/matrix.hpp"
#include "mlutd/random.hpp"

namespace mlutd {

/// Pareto(alpha, k): P(V > v) = (k / v)^alpha for v >= k.
struct ParetoTail {
    double alpha = 1.1;
    double scale = 20.0;

    void validate() const;
    double survival(double v) const;

    friend bool operator==(const ParetoTail&, const ParetoTail&) = default;
};

// Angular laws for the polar construction W = (V * Theta, V * (1 - Theta)).

struct ConstantTheta {
    double value = 0.5;
    friend bool operator==(const ConstantTheta&, const ConstantTheta&) = default;
};

/// (upper - lower) * X + lower with X ~ Beta(shape1, shape2).
struct ScaledBetaTheta {
    double shape1 = 0.1;
    double shape2 = 0.1;
    double lower = 0.4;
    double upper = 0.6;
    friend bool operator==(const ScaledBetaTheta&, const ScaledBetaTheta&) = default;
};

struct BetaTheta {
    double shape1 = 0.5;
    double shape2 = 0.5;
    friend bool operator==(const BetaTheta&, const BetaTheta&) = default;
};

struct BernoulliTheta {
    double p = 0.5;
    friend bool operator==(const BernoulliTheta&, const BernoulliTheta&) = default;
};

using ThetaLaw = std::variant<ConstantTheta, ScaledBetaTheta, BetaTheta, BernoulliTheta>;

void validate(const ThetaLaw& law);
/// True when Theta and 1 - Theta have the same law.
bool is_symmetric(const ThetaLaw& law);
double sample_theta(const ThetaLaw& law, Rng& rng);

struct GumbelCopula {
    double theta = 2.0;
    friend bool operator==(const GumbelCopula&, const GumbelCopula&) = default;
};

struct PolarMrv {
    ThetaLaw theta_law = ConstantTheta{};
    friend bool operator==(const PolarMrv&, const PolarMrv&) = default;
};

/// How the per-node weight vectors are generated.
struct DependenceScenario {
    std::variant<GumbelCopula, PolarMrv> variant = GumbelCopula{};
    ParetoTail marginal{};
    std::size_t layers = 2;

    void validate() const;
    bool is_gumbel() const { return std::holds_alternative<GumbelCopula>(variant); }

    friend bool operator==(const DependenceScenario&, const DependenceScenario&) = default;
};

/// Canonical text form, e.g. "gumbel:theta=2" or "polar:scaledbeta=0.1/0.1/0.4/0.6".
/// Non-default alpha, k and layers are appended as ",alpha=...,k=...,layers=...".
std::string to_string(const DependenceScenario& scenario);
DependenceScenario parse_scenario(const std::string& text);

/// N x L non-negative weights; rows are i.i.d. draws.
struct WeightMatrix {
    ColumnMatrix<double> values;
    std::string scenario;

    std::size_t nodes() const { return values.rows(); }
    std::size_t layers() const { return values.cols(); }
};

/// k * (1 - u)^(-1/alpha). Inputs in (1 - 2^-53, 1) are clamped to 1 - 2^-53.
double pareto_quantile(double u, const ParetoTail& tail);

/// Positive stable variate with Laplace transform exp(-t^index), 0 < index < 1.
double sample_positive_stable(double index, Rng& rng);

/// n x dim rows from the Gumbel copula (frailty construction).
ColumnMatrix<double> sample_gumbel_uniforms(std::size_t n, std::size_t dim, double theta, Rng& rng);

WeightMatrix sample_weights(const DependenceScenario& scenario, std::size_t n, Rng& rng);

/// Upper tail dependence of the Gumbel copula: 2 - 2^(1/theta).
double gumbel_true_utd(double theta);

/// Tail dependence of the polar construction by 1-D quadrature of
/// E[min(Theta, 1-Theta)^alpha] / E[Theta^alpha]. Requires a symmetric law.
double mrv_utd_quadrature(const ThetaLaw& law, const ParetoTail& tail, double tolerance = 1e-10);

struct MonteCarloUtd {
    double lambda = 0.0;
    double std_error = 0.0;
    double threshold_1 = 0.0;
    double threshold_2 = 0.0;
    std::size_t draws = 0;
};

struct MonteCarloOptions {
    double level = 1.0 - 1e-4;
    std::size_t draws = 10'000'000;
};

/// P(W2 > u2 | W1 > u1) at the given level with u_l the exact marginal
/// quantiles. The angular part is simulated; given Theta the radial
/// exceedance probabilities are evaluated exactly from the Pareto survival.
MonteCarloUtd mrv_utd_monte_carlo(const ThetaLaw& law, const ParetoTail& tail,
                                  const MonteCarloOptions& options, Rng& rng);

/// Plain simulation of (V*Theta, V*(1-Theta)) pairs with empirical thresholds.
/// Much noisier than mrv_utd_monte_carlo; kept as an end-to-end sanity check.
MonteCarloUtd mrv_utd_simulation(const ThetaLaw& law, const ParetoTail& tail,
                                 const MonteCarloOptions& options, Rng& rng);

/// Default truth for polar scenarios (quadrature route).
double mrv_true_utd(const ThetaLaw& law, const ParetoTail& tail, double precision = 1e-6);

struct MrvCrossCheck {
    double quadrature = 0.0;
    MonteCarloUtd monte_carlo;
    bool agree = false;
};

/// Runs both routes and reports whether they agree within `precision`.
/// Throws ConvergenceError when the Monte Carlo standard error alone exceeds precision / 2.
MrvCrossCheck mrv_cross_check(const ThetaLaw& law, const ParetoTail& tail, double precision,
                              Rng& rng, const MonteCarloOptions& options = {});

/// Ground-truth UTD between layers 0 and 1 for any scenario.
double true_utd(const DependenceScenario& scenario);

}  // namespace mlutd

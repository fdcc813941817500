#include "mlutd/weights.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <utility>
#include <vector>

#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/special_functions/beta.hpp>

#include "mlutd/errors.hpp"

namespace mlutd {

namespace {

constexpr double kMaxUniform = 1.0 - 0x1.0p-53;

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};

/// log of a Gamma(shape, 1) variate; stays finite for tiny shapes where the variate itself underflows.
double log_gamma_variate(double shape, Rng& rng) {
    if (shape >= 1.0) {
        std::gamma_distribution<double> gamma(shape, 1.0);
        return std::log(gamma(rng));
    }
    std::gamma_distribution<double> gamma(shape + 1.0, 1.0);
    return std::log(gamma(rng)) + std::log(rng.uniform_open()) / shape;
}

double sample_beta(double shape1, double shape2, Rng& rng) {
    const double log_x = log_gamma_variate(shape1, rng);
    const double log_y = log_gamma_variate(shape2, rng);
    // x / (x + y) evaluated as a logistic of the log ratio.
    const double d = log_y - log_x;
    if (d > 0.0) {
        const double e = std::exp(-d);
        return e / (1.0 + e);
    }
    return 1.0 / (1.0 + std::exp(d));
}

double log_sample_positive_stable(double index, Rng& rng) {
    const double u = std::numbers::pi * rng.uniform_open();
    const double e = rng.exponential();
    return std::log(std::sin(index * u)) - std::log(std::sin(u)) / index +
           (1.0 - index) / index * (std::log(std::sin((1.0 - index) * u)) - std::log(e));
}

double clamp_open_unit(double u) {
    if (u >= 1.0) return kMaxUniform;
    if (u <= 0.0) return std::numeric_limits<double>::min();
    return u;
}

// E[f(Theta)] for the angular law, by quadrature where the law has a density.
template <class F>
double theta_expectation(const ThetaLaw& law, F f, double tolerance) {
    boost::math::quadrature::tanh_sinh<double> integrator;

    // Beta(b1, b2) density at x, with xc the distance from x to the nearer endpoint of [lo, hi].
    auto beta_integral = [&](double b1, double b2, auto transform, double split) {
        const double log_norm = std::log(boost::math::beta(b1, b2));
        auto density = [=](double x, double one_minus_x) {
            return std::exp((b1 - 1.0) * std::log(x) + (b2 - 1.0) * std::log(one_minus_x) - log_norm);
        };
        auto lower_piece = [&](double x, double xc) {
            // On [0, split]: xc < 0 near 0 (distance to 0 is x itself), xc > 0 near split.
            (void)xc;
            return f(transform(x)) * density(x, 1.0 - x);
        };
        auto upper_piece = [&](double x, double xc) {
            const double one_minus_x = xc > 0.0 ? xc : 1.0 - x;
            return f(transform(x)) * density(x, one_minus_x);
        };
        double total = 0.0;
        if (split > 0.0) total += integrator.integrate(lower_piece, 0.0, split, tolerance);
        if (split < 1.0) total += integrator.integrate(upper_piece, split, 1.0, tolerance);
        return total;
    };

    return std::visit(
        overloaded{
            [&](const ConstantTheta& c) { return f(c.value); },
            [&](const BernoulliTheta& b) { return b.p * f(1.0) + (1.0 - b.p) * f(0.0); },
            [&](const BetaTheta& b) {
                return beta_integral(b.shape1, b.shape2, [](double x) { return x; }, 0.5);
            },
            [&](const ScaledBetaTheta& b) {
                const double width = b.upper - b.lower;
                double split = (0.5 - b.lower) / width;
                split = std::clamp(split, 0.0, 1.0);
                return beta_integral(
                    b.shape1, b.shape2, [&](double x) { return b.lower + width * x; }, split);
            },
        },
        law);
}

}  // namespace

void ParetoTail::validate() const {
    if (!(alpha > 0.0) || !std::isfinite(alpha)) throw ParameterError("Pareto tail index must be > 0");
    if (!(scale > 0.0) || !std::isfinite(scale)) throw ParameterError("Pareto scale must be > 0");
}

double ParetoTail::survival(double v) const {
    if (v <= scale) return 1.0;
    return std::pow(scale / v, alpha);
}

void validate(const ThetaLaw& law) {
    std::visit(overloaded{
                   [](const ConstantTheta& c) {
                       if (!(c.value > 0.0 && c.value < 1.0))
                           throw ParameterError("constant Theta must lie in (0, 1)");
                   },
                   [](const ScaledBetaTheta& b) {
                       if (!(b.shape1 > 0.0 && b.shape2 > 0.0))
                           throw ParameterError("Beta shapes must be > 0");
                       if (!(b.lower >= 0.0 && b.lower < b.upper && b.upper <= 1.0))
                           throw ParameterError("scaled Beta needs 0 <= lower < upper <= 1");
                   },
                   [](const BetaTheta& b) {
                       if (!(b.shape1 > 0.0 && b.shape2 > 0.0))
                           throw ParameterError("Beta shapes must be > 0");
                   },
                   [](const BernoulliTheta& b) {
                       if (!(b.p > 0.0 && b.p < 1.0))
                           throw ParameterError("Bernoulli p must lie in (0, 1)");
                   },
               },
               law);
}

bool is_symmetric(const ThetaLaw& law) {
    return std::visit(overloaded{
                          [](const ConstantTheta& c) { return c.value == 0.5; },
                          [](const ScaledBetaTheta& b) {
                              return b.shape1 == b.shape2 && b.lower + b.upper == 1.0;
                          },
                          [](const BetaTheta& b) { return b.shape1 == b.shape2; },
                          [](const BernoulliTheta& b) { return b.p == 0.5; },
                      },
                      law);
}

double sample_theta(const ThetaLaw& law, Rng& rng) {
    return std::visit(overloaded{
                          [](const ConstantTheta& c) { return c.value; },
                          [&](const ScaledBetaTheta& b) {
                              return (b.upper - b.lower) * sample_beta(b.shape1, b.shape2, rng) + b.lower;
                          },
                          [&](const BetaTheta& b) { return sample_beta(b.shape1, b.shape2, rng); },
                          [&](const BernoulliTheta& b) { return rng.uniform() < b.p ? 1.0 : 0.0; },
                      },
                      law);
}

void DependenceScenario::validate() const {
    marginal.validate();
    if (layers < 2) throw ParameterError("a scenario needs at least 2 layers");
    std::visit(overloaded{
                   [](const GumbelCopula& g) {
                       if (!(g.theta >= 1.0) || !std::isfinite(g.theta))
                           throw ParameterError("Gumbel theta must be >= 1");
                   },
                   [&](const PolarMrv& p) {
                       if (layers != 2) throw ParameterError("the polar construction is defined for 2 layers only");
                       mlutd::validate(p.theta_law);
                   },
               },
               variant);
}

double pareto_quantile(double u, const ParetoTail& tail) {
    tail.validate();
    if (!(u >= 0.0 && u < 1.0)) throw DomainError("Pareto quantile needs 0 <= u < 1");
    u = std::min(u, kMaxUniform);
    return tail.scale * std::pow(1.0 - u, -1.0 / tail.alpha);
}

double sample_positive_stable(double index, Rng& rng) {
    if (!(index > 0.0 && index < 1.0)) throw ParameterError("stable index must lie in (0, 1)");
    return std::exp(log_sample_positive_stable(index, rng));
}

ColumnMatrix<double> sample_gumbel_uniforms(std::size_t n, std::size_t dim, double theta, Rng& rng) {
    if (!(theta >= 1.0) || !std::isfinite(theta)) throw ParameterError("Gumbel theta must be >= 1");
    if (n < 1) throw DomainError("need at least one draw");
    if (dim < 2) throw DomainError("copula dimension must be >= 2");

    ColumnMatrix<double> out(n, dim);
    if (theta == 1.0) {
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t d = 0; d < dim; ++d) out(i, d) = rng.uniform_open();
        return out;
    }

    // Marshall-Olkin: U_d = psi(E_d / S) with psi(t) = exp(-t^(1/theta)) the LST of S.
    const double index = 1.0 / theta;
    for (std::size_t i = 0; i < n; ++i) {
        const double log_s = log_sample_positive_stable(index, rng);
        for (std::size_t d = 0; d < dim; ++d) {
            const double log_e = std::log(rng.exponential());
            out(i, d) = clamp_open_unit(std::exp(-std::exp(index * (log_e - log_s))));
        }
    }
    return out;
}

WeightMatrix sample_weights(const DependenceScenario& scenario, std::size_t n, Rng& rng) {
    scenario.validate();
    if (n < 1) throw DomainError("need at least one node");

    WeightMatrix w;
    w.scenario = to_string(scenario);
    const ParetoTail& tail = scenario.marginal;

    if (const auto* g = std::get_if<GumbelCopula>(&scenario.variant)) {
        w.values = sample_gumbel_uniforms(n, scenario.layers, g->theta, rng);
        for (std::size_t l = 0; l < scenario.layers; ++l)
            for (double& x : w.values.column(l)) x = pareto_quantile(x, tail);
        return w;
    }

    const auto& law = std::get<PolarMrv>(scenario.variant).theta_law;
    w.values = ColumnMatrix<double>(n, 2);
    for (std::size_t i = 0; i < n; ++i) {
        const double radius = pareto_quantile(rng.uniform(), tail);
        const double theta = sample_theta(law, rng);
        w.values(i, 0) = radius * theta;
        w.values(i, 1) = radius * (1.0 - theta);
    }
    return w;
}

double gumbel_true_utd(double theta) {
    if (!(theta >= 1.0) || std::isnan(theta)) throw ParameterError("Gumbel theta must be >= 1");
    return 2.0 - std::pow(2.0, 1.0 / theta);
}

double mrv_utd_quadrature(const ThetaLaw& law, const ParetoTail& tail, double tolerance) {
    validate(law);
    tail.validate();
    if (!is_symmetric(law))
        throw UnsupportedError("quadrature route needs Theta symmetric about 1/2");
    const double alpha = tail.alpha;
    const double joint = theta_expectation(
        law, [alpha](double t) { return std::pow(std::min(t, 1.0 - t), alpha); }, tolerance);
    const double marginal =
        theta_expectation(law, [alpha](double t) { return std::pow(t, alpha); }, tolerance);
    return joint / marginal;
}

MonteCarloUtd mrv_utd_monte_carlo(const ThetaLaw& law, const ParetoTail& tail,
                                  const MonteCarloOptions& options, Rng& rng) {
    validate(law);
    tail.validate();
    if (!(options.level > 0.0 && options.level < 1.0)) throw DomainError("level must lie in (0, 1)");
    if (options.draws < 2) throw DomainError("need at least two draws");

    const std::size_t n = options.draws;
    const double alpha = tail.alpha;
    const double k = tail.scale;
    const double exceed = 1.0 - options.level;

    std::vector<double> thetas(n);
    for (double& t : thetas) t = sample_theta(law, rng);

    // u solves mean_i min(1, (k c_i / u)^alpha) = exceed, with c_i = Theta_i or 1 - Theta_i.
    auto solve_threshold = [&](auto coord) {
        double moment = 0.0;
        double largest = 0.0;
        for (double t : thetas) {
            const double c = coord(t);
            moment += std::pow(c, alpha);
            largest = std::max(largest, c);
        }
        moment /= static_cast<double>(n);
        if (moment <= 0.0) throw ConvergenceError("no simulated mass in this coordinate");
        const double u = k * std::pow(moment / exceed, 1.0 / alpha);
        if (u >= k * largest) return u;

        auto survival = [&](double x) {
            double s = 0.0;
            for (double t : thetas) s += std::min(1.0, std::pow(k * coord(t) / x, alpha));
            return s / static_cast<double>(n);
        };
        double lo = 0.0;
        double hi = k * largest;
        for (int iter = 0; iter < 200 && hi - lo > 1e-12 * hi; ++iter) {
            const double mid = 0.5 * (lo + hi);
            (survival(mid) > exceed ? lo : hi) = mid;
        }
        return 0.5 * (lo + hi);
    };

    MonteCarloUtd out;
    out.draws = n;
    out.threshold_1 = solve_threshold([](double t) { return t; });
    out.threshold_2 = solve_threshold([](double t) { return 1.0 - t; });

    auto exceedances = [&](double t) {
        const double m = std::min(1.0, std::pow(k * t / out.threshold_1, alpha));
        const double reach = std::min(t / out.threshold_1, (1.0 - t) / out.threshold_2);
        return std::pair{std::min(1.0, std::pow(k * reach, alpha)), m};
    };

    double sum_joint = 0.0;
    double sum_marginal = 0.0;
    for (double t : thetas) {
        const auto [j, m] = exceedances(t);
        sum_joint += j;
        sum_marginal += m;
    }
    out.lambda = sum_joint / sum_marginal;

    // Delta-method standard error of the ratio estimator.
    const double mean_marginal = sum_marginal / static_cast<double>(n);
    double resid_sq = 0.0;
    for (double t : thetas) {
        const auto [j, m] = exceedances(t);
        const double r = j - out.lambda * m;
        resid_sq += r * r;
    }
    const double var = resid_sq / static_cast<double>(n - 1);
    out.std_error = std::sqrt(var / static_cast<double>(n)) / mean_marginal;
    return out;
}

MonteCarloUtd mrv_utd_simulation(const ThetaLaw& law, const ParetoTail& tail,
                                 const MonteCarloOptions& options, Rng& rng) {
    validate(law);
    tail.validate();
    if (!(options.level > 0.0 && options.level < 1.0)) throw DomainError("level must lie in (0, 1)");

    const std::size_t n = options.draws;
    const auto top = static_cast<std::size_t>(std::floor(static_cast<double>(n) * (1.0 - options.level) + 0.5));
    if (top < 1 || top >= n) throw DomainError("level leaves no usable exceedances");

    std::vector<double> w1(n), w2(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double radius = pareto_quantile(rng.uniform(), tail);
        const double theta = sample_theta(law, rng);
        w1[i] = radius * theta;
        w2[i] = radius * (1.0 - theta);
    }
    auto order_stat = [&](std::vector<double> v) {
        auto nth = v.begin() + static_cast<std::ptrdiff_t>(n - top - 1);
        std::nth_element(v.begin(), nth, v.end());
        return *nth;
    };

    MonteCarloUtd out;
    out.draws = n;
    out.threshold_1 = order_stat(w1);
    out.threshold_2 = order_stat(w2);
    std::size_t marginal = 0;
    std::size_t joint = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (w1[i] > out.threshold_1) {
            ++marginal;
            if (w2[i] > out.threshold_2) ++joint;
        }
    }
    if (marginal == 0) throw ConvergenceError("no exceedances in simulation");
    out.lambda = static_cast<double>(joint) / static_cast<double>(marginal);
    out.std_error = std::sqrt(out.lambda * (1.0 - out.lambda) / static_cast<double>(marginal));
    return out;
}

double mrv_true_utd(const ThetaLaw& law, const ParetoTail& tail, double precision) {
    if (!(precision > 0.0)) throw DomainError("precision must be > 0");
    return mrv_utd_quadrature(law, tail, std::min(1e-10, precision * 1e-3));
}

MrvCrossCheck mrv_cross_check(const ThetaLaw& law, const ParetoTail& tail, double precision,
                              Rng& rng, const MonteCarloOptions& options) {
    MrvCrossCheck out;
    out.quadrature = mrv_true_utd(law, tail, precision);
    out.monte_carlo = mrv_utd_monte_carlo(law, tail, options, rng);
    if (out.monte_carlo.std_error > 0.5 * precision)
        throw ConvergenceError("Monte Carlo standard error " + std::to_string(out.monte_carlo.std_error) +
                               " exceeds half the requested precision");
    out.agree = std::abs(out.quadrature - out.monte_carlo.lambda) <= precision;
    return out;
}

double true_utd(const DependenceScenario& scenario) {
    scenario.validate();
    if (const auto* g = std::get_if<GumbelCopula>(&scenario.variant)) return gumbel_true_utd(g->theta);
    return mrv_true_utd(std::get<PolarMrv>(scenario.variant).theta_law, scenario.marginal);
}

}  // namespace mlutd

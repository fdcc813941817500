#pragma once

#include <algorithm>
#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "json.hpp"

#include "mlutd/errors.hpp"

namespace mlutd {

struct TopCount {
    std::size_t count = 100;
    friend bool operator==(const TopCount&, const TopCount&) = default;
};

struct QuantileLevel {
    double level = 0.995;
    friend bool operator==(const QuantileLevel&, const QuantileLevel&) = default;
};

/// Number of upper order statistics used for the thresholds, given directly or as a level q.
using ThresholdSpec = std::variant<TopCount, QuantileLevel>;

/// t_N for a sample of size n. QuantileLevel maps to round-half-up(n (1 - q)).
/// Throws DomainError unless 1 <= t_N < n.
std::size_t resolve_top_count(const ThresholdSpec& spec, std::size_t n);

std::string to_string(const ThresholdSpec& spec);
/// "top:100" or "quantile:0.995".
ThresholdSpec parse_threshold(const std::string& text);

struct UtdEstimate {
    double lambda_hat = 0.0;
    std::size_t t_n = 0;
    double threshold_1 = 0.0;
    double threshold_2 = 0.0;
    std::size_t marginal_exceedances = 0;
    std::size_t joint_exceedances = 0;
    bool degenerate = false;  // marginal_exceedances == 0

    friend bool operator==(const UtdEstimate&, const UtdEstimate&) = default;
};

void to_json(nlohmann::json& j, const UtdEstimate& e);
void from_json(const nlohmann::json& j, UtdEstimate& e);

/// Generalised inverse of the empirical CDF at 1 - t_n / N, i.e. the
/// (N - t_n)-th smallest value. Exceedances of it are counted strictly.
template <typename T>
T empirical_threshold(std::span<const T> sample, std::size_t t_n) {
    const std::size_t n = sample.size();
    if (t_n < 1 || t_n >= n) throw DomainError("threshold needs 1 <= t_n < N");
    std::vector<T> copy(sample.begin(), sample.end());
    auto nth = copy.begin() + static_cast<std::ptrdiff_t>(n - t_n - 1);
    std::nth_element(copy.begin(), nth, copy.end());
    return *nth;
}

template <typename T>
std::size_t count_exceedances(std::span<const T> sample, T threshold) {
    return static_cast<std::size_t>(
        std::count_if(sample.begin(), sample.end(), [threshold](T x) { return x > threshold; }));
}

/// Empirical upper tail dependence of sample_2 on sample_1 (paired by index).
template <typename T>
UtdEstimate utd_estimate(std::span<const T> sample_1, std::span<const T> sample_2, const ThresholdSpec& spec) {
    if (sample_1.size() != sample_2.size()) throw ShapeError("paired samples must have equal length");
    if (sample_1.size() < 2) throw DomainError("need at least two paired observations");

    UtdEstimate est;
    est.t_n = resolve_top_count(spec, sample_1.size());
    const T u1 = empirical_threshold(sample_1, est.t_n);
    const T u2 = empirical_threshold(sample_2, est.t_n);
    est.threshold_1 = static_cast<double>(u1);
    est.threshold_2 = static_cast<double>(u2);
    for (std::size_t i = 0; i < sample_1.size(); ++i) {
        if (sample_1[i] > u1) {
            ++est.marginal_exceedances;
            if (sample_2[i] > u2) ++est.joint_exceedances;
        }
    }
    est.degenerate = est.marginal_exceedances == 0;
    est.lambda_hat = est.degenerate ? 0.0
                                    : static_cast<double>(est.joint_exceedances) /
                                          static_cast<double>(est.marginal_exceedances);
    return est;
}

/// Hill estimate of the tail index from the k largest values over the (k+1)-th.
double hill_tail_index(std::span<const double> sample, std::size_t k);

/// Default number of order statistics for the Hill check: ceil(0.05 N).
std::size_t default_hill_k(std::size_t n);

/// (k, alpha_hat(k)) for k = 1 .. k_max.
std::vector<std::pair<std::size_t, double>> hill_plot(std::span<const double> sample, std::size_t k_max);

double pearson_correlation(std::span<const double> x, std::span<const double> y);

struct ReplicationSummary {
    double mean = 0.0;
    double mse = 0.0;
    double variance = 0.0;         // unbiased (n - 1) sample variance
    double scaled_variance = 0.0;  // t_n * variance
    std::size_t count = 0;
};

ReplicationSummary replication_summary(std::span<const double> estimates, double truth, std::size_t t_n);

}  // namespace mlutd

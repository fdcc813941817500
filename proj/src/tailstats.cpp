#include "mlutd/tailstats.hpp"

#include <charconv>
#include <cmath>
#include <functional>
#include <system_error>

namespace mlutd {

std::size_t resolve_top_count(const ThresholdSpec& spec, std::size_t n) {
    std::size_t t_n = 0;
    if (const auto* top = std::get_if<TopCount>(&spec)) {
        t_n = top->count;
    } else {
        const double q = std::get<QuantileLevel>(spec).level;
        if (!(q > 0.0 && q < 1.0)) throw DomainError("quantile level must lie in (0, 1)");
        t_n = static_cast<std::size_t>(std::floor(static_cast<double>(n) * (1.0 - q) + 0.5));
    }
    if (t_n < 1 || t_n >= n)
        throw DomainError("top count " + std::to_string(t_n) + " invalid for sample size " + std::to_string(n));
    return t_n;
}

std::string to_string(const ThresholdSpec& spec) {
    if (const auto* top = std::get_if<TopCount>(&spec)) return "top:" + std::to_string(top->count);
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, std::get<QuantileLevel>(spec).level);
    return "quantile:" + std::string(buf, end);
}

ThresholdSpec parse_threshold(const std::string& text) {
    const auto colon = text.find(':');
    const std::string kind = text.substr(0, colon);
    const std::string value = colon == std::string::npos ? "" : text.substr(colon + 1);
    if (kind == "top") {
        std::size_t count = 0;
        auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), count);
        if (ec != std::errc{} || ptr != value.data() + value.size() || value.empty() || count < 1)
            throw ParameterError("bad top count in '" + text + "'");
        return TopCount{count};
    }
    if (kind == "quantile") {
        double q = 0.0;
        auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), q);
        if (ec != std::errc{} || ptr != value.data() + value.size() || value.empty() || !(q > 0.0 && q < 1.0))
            throw ParameterError("bad quantile level in '" + text + "'");
        return QuantileLevel{q};
    }
    throw ParameterError("threshold must be 'top:<count>' or 'quantile:<level>', got '" + text + "'");
}

void to_json(nlohmann::json& j, const UtdEstimate& e) {
    j = nlohmann::json{{"lambda_hat", e.lambda_hat},
                       {"t_n", e.t_n},
                       {"threshold_1", e.threshold_1},
                       {"threshold_2", e.threshold_2},
                       {"marginal_exceedances", e.marginal_exceedances},
                       {"joint_exceedances", e.joint_exceedances},
                       {"degenerate", e.degenerate}};
}

void from_json(const nlohmann::json& j, UtdEstimate& e) {
    j.at("lambda_hat").get_to(e.lambda_hat);
    j.at("t_n").get_to(e.t_n);
    j.at("threshold_1").get_to(e.threshold_1);
    j.at("threshold_2").get_to(e.threshold_2);
    j.at("marginal_exceedances").get_to(e.marginal_exceedances);
    j.at("joint_exceedances").get_to(e.joint_exceedances);
    j.at("degenerate").get_to(e.degenerate);
}

namespace {

// Top k + 1 values in descending order.
std::vector<double> upper_order_statistics(std::span<const double> sample, std::size_t k) {
    if (k < 1) throw DomainError("Hill estimator needs k >= 1");
    if (sample.size() < k + 1) throw DomainError("Hill estimator needs at least k + 1 values");
    std::vector<double> sorted(sample.begin(), sample.end());
    std::partial_sort(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(k + 1), sorted.end(),
                      std::greater<>());
    sorted.resize(k + 1);
    if (!(sorted[k] > 0.0)) throw DomainError("Hill estimator needs the top k + 1 values to be positive");
    return sorted;
}

}  // namespace

double hill_tail_index(std::span<const double> sample, std::size_t k) {
    const auto top = upper_order_statistics(sample, k);
    const double log_base = std::log(top[k]);
    double sum = 0.0;
    for (std::size_t i = 0; i < k; ++i) sum += std::log(top[i]) - log_base;
    if (!(sum > 0.0)) throw DomainError("Hill estimator undefined: top k values all tie with the (k+1)-th");
    return static_cast<double>(k) / sum;
}

std::size_t default_hill_k(std::size_t n) {
    return std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(0.05 * static_cast<double>(n))));
}

std::vector<std::pair<std::size_t, double>> hill_plot(std::span<const double> sample, std::size_t k_max) {
    const auto top = upper_order_statistics(sample, k_max);
    std::vector<std::pair<std::size_t, double>> out;
    double sum_logs = 0.0;
    for (std::size_t k = 1; k <= k_max; ++k) {
        sum_logs += std::log(top[k - 1]);
        const double s = sum_logs - static_cast<double>(k) * std::log(top[k]);
        if (s > 0.0) out.emplace_back(k, static_cast<double>(k) / s);
    }
    return out;
}

double pearson_correlation(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw ShapeError("correlation inputs must have equal length");
    if (x.size() < 2) throw DomainError("correlation needs at least two points");
    const double n = static_cast<double>(x.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, syy = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double dx = x[i] - mx;
        const double dy = y[i] - my;
        sxx += dx * dx;
        syy += dy * dy;
        sxy += dx * dy;
    }
    if (!(sxx > 0.0) || !(syy > 0.0)) throw DomainError("correlation undefined for zero variance");
    return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

ReplicationSummary replication_summary(std::span<const double> estimates, double truth, std::size_t t_n) {
    if (estimates.size() < 2) throw DomainError("replication summary needs at least two estimates");
    ReplicationSummary s;
    s.count = estimates.size();
    const double n = static_cast<double>(s.count);
    for (double e : estimates) s.mean += e;
    s.mean /= n;
    double ss = 0.0;
    for (double e : estimates) {
        ss += (e - s.mean) * (e - s.mean);
        s.mse += (e - truth) * (e - truth);
    }
    s.mse /= n;
    s.variance = ss / (n - 1.0);
    s.scaled_variance = static_cast<double>(t_n) * s.variance;
    return s;
}

}  // namespace mlutd

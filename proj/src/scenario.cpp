#include <charconv>
#include <cmath>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "mlutd/errors.hpp"
#include "mlutd/weights.hpp"

namespace mlutd {

namespace {

std::string fmt(double x) {
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, end);
}

double parse_number(std::string_view text, const std::string& context) {
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || ptr != text.data() + text.size() || text.empty())
        throw ParameterError("bad number '" + std::string(text) + "' in scenario '" + context + "'");
    return value;
}

std::vector<std::string_view> split(std::string_view text, char sep) {
    std::vector<std::string_view> parts;
    std::size_t start = 0;
    while (true) {
        const auto pos = text.find(sep, start);
        parts.push_back(text.substr(start, pos - start));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return parts;
}

std::vector<double> parse_numbers(std::string_view text, std::size_t expected, const std::string& context) {
    std::vector<double> out;
    for (auto piece : split(text, '/')) out.push_back(parse_number(piece, context));
    if (out.size() != expected)
        throw ParameterError("expected " + std::to_string(expected) + " '/'-separated values in '" + context + "'");
    return out;
}

std::string law_to_string(const ThetaLaw& law) {
    if (const auto* c = std::get_if<ConstantTheta>(&law)) return "constant=" + fmt(c->value);
    if (const auto* b = std::get_if<BetaTheta>(&law)) return "beta=" + fmt(b->shape1) + "/" + fmt(b->shape2);
    if (const auto* s = std::get_if<ScaledBetaTheta>(&law))
        return "scaledbeta=" + fmt(s->shape1) + "/" + fmt(s->shape2) + "/" + fmt(s->lower) + "/" + fmt(s->upper);
    return "bernoulli=" + fmt(std::get<BernoulliTheta>(law).p);
}

}  // namespace

std::string to_string(const DependenceScenario& scenario) {
    std::string out;
    if (const auto* g = std::get_if<GumbelCopula>(&scenario.variant))
        out = "gumbel:theta=" + fmt(g->theta);
    else
        out = "polar:" + law_to_string(std::get<PolarMrv>(scenario.variant).theta_law);

    const ParetoTail defaults{};
    if (scenario.marginal.alpha != defaults.alpha) out += ",alpha=" + fmt(scenario.marginal.alpha);
    if (scenario.marginal.scale != defaults.scale) out += ",k=" + fmt(scenario.marginal.scale);
    if (scenario.layers != 2) out += ",layers=" + std::to_string(scenario.layers);
    return out;
}

DependenceScenario parse_scenario(const std::string& text) {
    const auto colon = text.find(':');
    if (colon == std::string::npos)
        throw ParameterError("scenario '" + text + "' must look like family:key=value[,key=value]");
    const std::string_view family = std::string_view(text).substr(0, colon);
    const std::string_view body = std::string_view(text).substr(colon + 1);

    DependenceScenario scenario;
    bool have_core = false;
    if (family == "polar") scenario.variant = PolarMrv{};
    else if (family != "gumbel") throw ParameterError("unknown scenario family '" + std::string(family) + "'");

    for (auto item : split(body, ',')) {
        const auto eq = item.find('=');
        if (eq == std::string_view::npos) throw ParameterError("expected key=value in scenario '" + text + "'");
        const auto key = item.substr(0, eq);
        const auto value = item.substr(eq + 1);

        if (key == "alpha") {
            scenario.marginal.alpha = parse_number(value, text);
        } else if (key == "k") {
            scenario.marginal.scale = parse_number(value, text);
        } else if (key == "layers") {
            const double layers = parse_number(value, text);
            if (layers < 1 || layers != std::floor(layers)) throw ParameterError("layers must be a positive integer");
            scenario.layers = static_cast<std::size_t>(layers);
        } else if (family == "gumbel" && key == "theta") {
            scenario.variant = GumbelCopula{parse_number(value, text)};
            have_core = true;
        } else if (family == "polar" && !have_core) {
            ThetaLaw law;
            if (key == "constant") {
                law = ConstantTheta{parse_number(value, text)};
            } else if (key == "beta") {
                const auto v = parse_numbers(value, 2, text);
                law = BetaTheta{v[0], v[1]};
            } else if (key == "scaledbeta") {
                const auto v = parse_numbers(value, 4, text);
                law = ScaledBetaTheta{v[0], v[1], v[2], v[3]};
            } else if (key == "bernoulli") {
                law = BernoulliTheta{parse_number(value, text)};
            } else {
                throw ParameterError("unknown key '" + std::string(key) + "' in scenario '" + text + "'");
            }
            scenario.variant = PolarMrv{law};
            have_core = true;
        } else {
            throw ParameterError("unknown or repeated key '" + std::string(key) + "' in scenario '" + text + "'");
        }
    }
    if (!have_core) throw ParameterError("scenario '" + text + "' is missing its dependence parameter");
    scenario.validate();
    return scenario;
}

}  // namespace mlutd

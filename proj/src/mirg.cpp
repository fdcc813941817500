#include "mlutd/mirg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <random>

#include "mlutd/errors.hpp"

namespace mlutd {

namespace {

constexpr std::uint64_t kOne32 = 1ULL << 32;

double layer_total(std::span<const double> column) {
    double total = 0.0;
    for (double w : column) {
        if (!(w >= 0.0) || !std::isfinite(w)) throw ParameterError("weights must be finite and non-negative");
        total += w;
    }
    if (!(total > 0.0)) throw DegenerateError("layer has zero total weight");
    return total;
}

std::uint64_t poisson(double mean, Rng& rng) {
    if (mean <= 0.0) return 0;
    std::poisson_distribution<std::uint64_t> dist(mean);
    return dist(rng);
}

void check_weights(const WeightMatrix& weights) {
    if (weights.nodes() < 1) throw DomainError("graph needs at least one node");
    if (weights.nodes() > std::numeric_limits<std::uint32_t>::max())
        throw DomainError("node count exceeds 32-bit index range");
}

// Each layer draws from its own stream keyed on one draw from the caller's generator.
template <class Visit>
void pairwise_events(const WeightMatrix& weights, std::span<const ConnectionFunction> g, Rng& rng, Visit&& visit) {
    check_weights(weights);
    if (g.size() != weights.layers()) throw ShapeError("need one connection function per layer");
    const std::uint64_t key = rng();
    const std::size_t n = weights.nodes();
    for (std::size_t l = 0; l < weights.layers(); ++l) {
        const auto w = weights.values.column(l);
        const double total = layer_total(w);
        Rng layer_rng(derive_key(key, l));
        for (std::size_t i = 0; i < n; ++i) {
            if (w[i] == 0.0) continue;
            const double scaled = w[i] / total;
            for (std::size_t j = i; j < n; ++j) {
                const std::uint64_t count = poisson(g[l](scaled * w[j]), layer_rng);
                if (count > 0) visit(l, static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j), count);
            }
        }
    }
}

// Ordered pairs (i, j) arrive at rate W_i W_j / T; off-diagonal ones are kept with
// probability 1/2 so each unordered pair ends up with rate W_i W_j / T.
template <class Visit>
void fast_events(const WeightMatrix& weights, Rng& rng, Visit&& visit) {
    check_weights(weights);
    const std::uint64_t key = rng();
    for (std::size_t l = 0; l < weights.layers(); ++l) {
        const auto w = weights.values.column(l);
        const double total = layer_total(w);
        const AliasTable table(w);
        Rng layer_rng(derive_key(key, l));
        const std::uint64_t events = poisson(total, layer_rng);

        std::uint64_t coin_bits = 0;
        int coins_left = 0;
        for (std::uint64_t e = 0; e < events; ++e) {
            const auto i = static_cast<std::uint32_t>(table(layer_rng()));
            const auto j = static_cast<std::uint32_t>(table(layer_rng()));
            if (i == j) {
                visit(l, i, j, 1);
                continue;
            }
            if (coins_left == 0) {
                coin_bits = layer_rng();
                coins_left = 64;
            }
            const bool keep = coin_bits & 1ULL;
            coin_bits >>= 1;
            --coins_left;
            if (keep) visit(l, std::min(i, j), std::max(i, j), 1);
        }
    }
}

MultilayerGraph empty_graph(const WeightMatrix& weights, Backend source) {
    MultilayerGraph graph;
    graph.source = source;
    graph.nodes = weights.nodes();
    graph.layers.resize(weights.layers());
    return graph;
}

std::vector<ConnectionFunction> identity_functions(std::size_t layers) {
    return std::vector<ConnectionFunction>(layers, ConnectionFunction::identity());
}

}  // namespace

Backend resolve_backend(Backend backend, std::size_t nodes) {
    if (backend != Backend::Auto) return backend;
    return nodes <= kAutoPairwiseLimit ? Backend::Pairwise : Backend::FastIdentity;
}

std::string to_string(Backend backend) {
    switch (backend) {
        case Backend::Auto: return "auto";
        case Backend::Pairwise: return "pairwise";
        case Backend::FastIdentity: return "fast";
    }
    return "auto";
}

Backend parse_backend(const std::string& text) {
    if (text == "auto") return Backend::Auto;
    if (text == "pairwise") return Backend::Pairwise;
    if (text == "fast") return Backend::FastIdentity;
    throw ParameterError("unknown backend '" + text + "' (expected auto, pairwise or fast)");
}

AliasTable::AliasTable(std::span<const double> weights) {
    const std::size_t n = weights.size();
    if (n == 0) throw DomainError("alias table needs at least one weight");
    if (n > std::numeric_limits<std::uint32_t>::max()) throw DomainError("too many weights for alias table");
    double total = 0.0;
    for (double w : weights) {
        if (!(w >= 0.0) || !std::isfinite(w)) throw ParameterError("alias weights must be finite and non-negative");
        total += w;
    }
    if (!(total > 0.0)) throw DegenerateError("alias weights sum to zero");

    accept_.assign(n, kOne32);
    alias_.resize(n);
    std::vector<double> scaled(n);
    std::vector<std::uint32_t> small, large;
    for (std::size_t i = 0; i < n; ++i) {
        alias_[i] = static_cast<std::uint32_t>(i);
        scaled[i] = weights[i] * static_cast<double>(n) / total;
        (scaled[i] < 1.0 ? small : large).push_back(static_cast<std::uint32_t>(i));
    }
    while (!small.empty() && !large.empty()) {
        const std::uint32_t s = small.back();
        small.pop_back();
        const std::uint32_t g = large.back();
        accept_[s] = static_cast<std::uint64_t>(std::llround(scaled[s] * static_cast<double>(kOne32)));
        alias_[s] = g;
        scaled[g] = (scaled[g] + scaled[s]) - 1.0;
        if (scaled[g] < 1.0) {
            large.pop_back();
            small.push_back(g);
        }
    }
    // Leftovers are 1 up to rounding and keep their own slot.
}

double AliasTable::probability(std::size_t index) const {
    const double n = static_cast<double>(alias_.size());
    double p = static_cast<double>(accept_[index]) / static_cast<double>(kOne32) / n;
    for (std::size_t s = 0; s < alias_.size(); ++s)
        if (alias_[s] == index && s != index)
            p += (1.0 - static_cast<double>(accept_[s]) / static_cast<double>(kOne32)) / n;
    return p;
}

MultilayerGraph build_pairwise(const WeightMatrix& weights, std::span<const ConnectionFunction> g, Rng& rng) {
    MultilayerGraph graph = empty_graph(weights, Backend::Pairwise);
    pairwise_events(weights, g, rng, [&](std::size_t l, std::uint32_t i, std::uint32_t j, std::uint64_t count) {
        graph.layers[l].push_back(Edge{i, j, count});
    });
    return graph;
}

MultilayerGraph build_pairwise(const WeightMatrix& weights, Rng& rng) {
    const auto g = identity_functions(weights.layers());
    return build_pairwise(weights, g, rng);
}

MultilayerGraph build_fast_identity(const WeightMatrix& weights, Rng& rng) {
    MultilayerGraph graph = empty_graph(weights, Backend::FastIdentity);
    std::vector<std::vector<std::uint64_t>> keys(weights.layers());
    fast_events(weights, rng, [&](std::size_t l, std::uint32_t i, std::uint32_t j, std::uint64_t) {
        keys[l].push_back((static_cast<std::uint64_t>(i) << 32) | j);
    });
    for (std::size_t l = 0; l < keys.size(); ++l) {
        auto& k = keys[l];
        std::sort(k.begin(), k.end());
        for (std::size_t a = 0; a < k.size();) {
            std::size_t b = a;
            while (b < k.size() && k[b] == k[a]) ++b;
            graph.layers[l].push_back(Edge{static_cast<std::uint32_t>(k[a] >> 32),
                                           static_cast<std::uint32_t>(k[a] & 0xFFFFFFFFULL), b - a});
            a = b;
        }
    }
    return graph;
}

MultilayerGraph build_fast_identity(const WeightMatrix& weights, std::span<const ConnectionFunction> g,
                                    Rng& rng) {
    for (const auto& fn : g)
        if (!fn.is_identity()) throw UnsupportedError("fast backend supports the identity connection function only");
    if (g.size() != weights.layers()) throw ShapeError("need one connection function per layer");
    return build_fast_identity(weights, rng);
}

MultilayerGraph build_graph(const WeightMatrix& weights, Backend backend, Rng& rng) {
    if (resolve_backend(backend, weights.nodes()) == Backend::Pairwise) return build_pairwise(weights, rng);
    return build_fast_identity(weights, rng);
}

MultilayerDegrees degrees(const MultilayerGraph& graph) {
    MultilayerDegrees out;
    out.source = graph.source;
    out.values = ColumnMatrix<std::int64_t>(graph.nodes, graph.layer_count());
    for (std::size_t l = 0; l < graph.layer_count(); ++l) {
        auto d = out.values.column(l);
        for (const Edge& e : graph.layers[l]) {
            const auto m = static_cast<std::int64_t>(e.multiplicity);
            d[e.i] += m;
            if (e.j != e.i) d[e.j] += m;
        }
    }
    return out;
}

MultilayerDegrees sample_degrees(const WeightMatrix& weights, Backend backend, Rng& rng) {
    MultilayerDegrees out;
    out.source = resolve_backend(backend, weights.nodes());
    out.values = ColumnMatrix<std::int64_t>(weights.nodes(), weights.layers());
    auto add = [&](std::size_t l, std::uint32_t i, std::uint32_t j, std::uint64_t count) {
        const auto m = static_cast<std::int64_t>(count);
        out.values(i, l) += m;
        if (i != j) out.values(j, l) += m;
    };
    if (out.source == Backend::Pairwise) {
        const auto g = identity_functions(weights.layers());
        pairwise_events(weights, g, rng, add);
    } else {
        fast_events(weights, rng, add);
    }
    return out;
}

void write_degrees_csv(std::ostream& out, const MultilayerDegrees& degrees) {
    out << "node";
    for (std::size_t l = 0; l < degrees.layers(); ++l) out << ",layer_" << (l + 1);
    out << '\n';
    for (std::size_t i = 0; i < degrees.nodes(); ++i) {
        out << i;
        for (std::size_t l = 0; l < degrees.layers(); ++l) out << ',' << degrees.values(i, l);
        out << '\n';
    }
}

void write_edge_list(std::ostream& out, const MultilayerGraph& graph, std::size_t layer) {
    if (layer >= graph.layer_count()) throw DomainError("layer index out of range");
    for (const Edge& e : graph.layers[layer]) out << e.i << ' ' << e.j << ' ' << e.multiplicity << '\n';
}

}  // namespace mlutd

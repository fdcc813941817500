#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "mlutd/matrix.hpp"
#include "mlutd/random.hpp"
#include "mlutd/weights.hpp"

namespace mlutd {

/// Graph realisation strategy. `Auto` picks Pairwise up to kAutoPairwiseLimit nodes.
enum class Backend { Auto, Pairwise, FastIdentity };

inline constexpr std::size_t kAutoPairwiseLimit = 2000;

Backend resolve_backend(Backend backend, std::size_t nodes);
std::string to_string(Backend backend);
Backend parse_backend(const std::string& text);

/// Layer connection function g: expected multiplicity of {i, j} is g(W_i W_j / T).
class ConnectionFunction {
public:
    static ConnectionFunction identity() { return ConnectionFunction(); }
    static ConnectionFunction custom(std::function<double(double)> g) { return ConnectionFunction(std::move(g)); }

    bool is_identity() const { return !fn_; }
    double operator()(double x) const { return fn_ ? fn_(x) : x; }

private:
    ConnectionFunction() = default;
    explicit ConnectionFunction(std::function<double(double)> g) : fn_(std::move(g)) {}

    std::function<double(double)> fn_;
};

struct Edge {
    std::uint32_t i = 0;  // i <= j
    std::uint32_t j = 0;
    std::uint64_t multiplicity = 0;

    friend bool operator==(const Edge&, const Edge&) = default;
};

/// Undirected multigraph per layer. Each layer holds distinct (i, j) pairs sorted by (i, j).
struct MultilayerGraph {
    std::size_t nodes = 0;
    std::vector<std::vector<Edge>> layers;
    Backend source = Backend::Auto;

    std::size_t layer_count() const { return layers.size(); }
};

struct MultilayerDegrees {
    ColumnMatrix<std::int64_t> values;
    Backend source = Backend::Auto;

    std::size_t nodes() const { return values.rows(); }
    std::size_t layers() const { return values.cols(); }
};

/**
 * Walker/Vose alias table over non-negative weights.
 *
 * One 64-bit random word yields one sample: the high 32 bits pick a slot by
 * multiply-shift, the low 32 bits are the acceptance coin for that slot.
 */
class AliasTable {
public:
    explicit AliasTable(std::span<const double> weights);

    std::size_t size() const { return alias_.size(); }

    std::size_t operator()(std::uint64_t bits) const {
        const std::uint64_t slot = ((bits >> 32) * static_cast<std::uint64_t>(alias_.size())) >> 32;
        return (bits & 0xFFFFFFFFULL) < accept_[slot] ? slot : alias_[slot];
    }

    /// Probability of drawing `index`, reconstructed from the table (for tests).
    double probability(std::size_t index) const;

private:
    std::vector<std::uint64_t> accept_;  // acceptance threshold scaled by 2^32
    std::vector<std::uint32_t> alias_;
};

/// Exact O(N^2 L) construction: every pair i <= j gets an independent Poisson count.
MultilayerGraph build_pairwise(const WeightMatrix& weights, std::span<const ConnectionFunction> g, Rng& rng);
MultilayerGraph build_pairwise(const WeightMatrix& weights, Rng& rng);

/// Poisson-process construction for identity g; same law as build_pairwise.
MultilayerGraph build_fast_identity(const WeightMatrix& weights, Rng& rng);
MultilayerGraph build_fast_identity(const WeightMatrix& weights, std::span<const ConnectionFunction> g, Rng& rng);

MultilayerGraph build_graph(const WeightMatrix& weights, Backend backend, Rng& rng);

/// D_il = sum of incident edge copies; a self-loop copy counts once.
MultilayerDegrees degrees(const MultilayerGraph& graph);

/// degrees(build_graph(weights, backend, rng)) without storing edges.
/// Consumes the generator identically, so results are bitwise equal.
MultilayerDegrees sample_degrees(const WeightMatrix& weights, Backend backend, Rng& rng);

/// CSV with header node,layer_1,...,layer_L; 0-based node index.
void write_degrees_csv(std::ostream& out, const MultilayerDegrees& degrees);
/// One "i j multiplicity" line per stored pair, 0-based.
void write_edge_list(std::ostream& out, const MultilayerGraph& graph, std::size_t layer);

}  // namespace mlutd

#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <random>

namespace mlutd {

/// SplitMix64 finalizer; used only to derive well-separated seeds.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

/// Combine a key with a stream index into a child key. Order matters:
/// derive_key(derive_key(k, a), b) != derive_key(derive_key(k, b), a) in general.
constexpr std::uint64_t derive_key(std::uint64_t key, std::uint64_t stream) noexcept {
    return mix64(key ^ mix64(stream + 0x632BE59BD9B4E019ULL));
}

/**
 * Seedable, splittable random source.
 *
 * Wraps std::mt19937_64 and satisfies UniformRandomBitGenerator, so it can be
 * handed to <random> distributions directly. `split(stream)` returns an
 * independent child generator keyed on (own key, stream) without touching the
 * parent's state; `fork()` consumes one draw from the parent and keys a child
 * on it, which is what samplers use to hand sub-streams to parallel units.
 */
class Rng {
public:
    using result_type = std::uint64_t;

    explicit Rng(std::uint64_t key) : key_(key), engine_(seed_from(key)) {}

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

    result_type operator()() { return engine_(); }

    std::uint64_t key() const noexcept { return key_; }

    Rng split(std::uint64_t stream) const { return Rng(derive_key(key_, stream)); }

    Rng fork() { return Rng(mix64(engine_())); }

    /// Uniform on [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    /// Uniform on the open interval (0, 1).
    double uniform_open() { return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53; }

    /// Unit-rate exponential.
    double exponential() { return -std::log(uniform_open()); }

private:
    static std::mt19937_64 seed_from(std::uint64_t key) {
        std::seed_seq seq{static_cast<std::uint32_t>(key), static_cast<std::uint32_t>(key >> 32),
                          static_cast<std::uint32_t>(mix64(key)),
                          static_cast<std::uint32_t>(mix64(key) >> 32)};
        return std::mt19937_64(seq);
    }

    std::uint64_t key_;
    std::mt19937_64 engine_;
};

}  // namespace mlutd

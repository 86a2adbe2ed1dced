#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace covote {

// All randomized code in the library draws through this wrapper so a fixed
// seed reproduces byte-identical results.  Distribution transforms are
// hand-rolled because the std:: distribution objects are not pinned across
// standard library versions.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next() { return engine_(); }

    // Uniform double in [0, 1) with 53 random bits.
    double uniform01() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    // Unbiased uniform integer in [0, n); n must be positive.
    std::uint64_t below(std::uint64_t n);

    bool bernoulli(double p) { return uniform01() < p; }

    // Exact Poisson sampling: inversion for small rates, additive splitting
    // for large ones (a Poisson sum of Poisson halves keeps the law exact).
    std::int64_t poisson(double rate);

    // Box-Muller; draws two uniforms per call and keeps no hidden state.
    double normal(double mean = 0.0, double stddev = 1.0);

private:
    std::mt19937_64 engine_;
};

// Stable seed derivation for named substreams (e.g. one fit per roll-call).
// FNV-1a over the label mixed into the root via splitmix64 finalizers.
std::uint64_t derive_seed(std::uint64_t root, std::string_view label);

} // namespace covote

#include "covote/rng.hpp"

#include <cmath>

#include "covote/errors.hpp"

namespace covote {

std::uint64_t Rng::below(std::uint64_t n) {
    if (n == 0) throw precondition_error("Rng::below requires a positive bound");
    // Rejection sampling over the largest multiple of n; no modulo bias.
    const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
    for (;;) {
        std::uint64_t x = engine_();
        if (x < limit) return x % n;
    }
}

std::int64_t Rng::poisson(double rate) {
    if (rate < 0.0 || !std::isfinite(rate)) throw precondition_error("Poisson rate must be finite and >= 0");
    if (rate == 0.0) return 0;
    if (rate > 30.0) {
        // Splitting keeps the law exact and the inversion loop short.
        return poisson(rate / 2.0) + poisson(rate / 2.0);
    }
    const double threshold = std::exp(-rate);
    std::int64_t count = -1;
    double product = 1.0;
    do {
        product *= uniform01();
        ++count;
    } while (product > threshold);
    return count;
}

double Rng::normal(double mean, double stddev) {
    // 1 - u keeps the log argument in (0, 1].
    double u1 = 1.0 - uniform01();
    double u2 = uniform01();
    double z = std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925287 * u2);
    return mean + stddev * z;
}

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

} // namespace

std::uint64_t derive_seed(std::uint64_t root, std::string_view label) {
    std::uint64_t h = 1469598103934665603ULL; // FNV-1a offset basis
    for (unsigned char c : label) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return splitmix64(splitmix64(root) ^ h);
}

} // namespace covote

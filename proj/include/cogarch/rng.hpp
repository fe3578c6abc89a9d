#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace cogarch {

// Seedable 64-bit generator (mt19937_64 core) with hand-rolled variate
// transforms so that draws depend only on the engine state, not on the
// standard library's distribution internals. Identical seeds replay
// identical streams, which the statistical test suites rely on.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    // Uniform on the open interval (0, 1).
    double uniform() { return (static_cast<double>(eng_() >> 11) + 0.5) * 0x1.0p-53; }

    // Standard normal via Box-Muller; two uniforms per draw, no caching.
    double normal() {
        const double u1 = uniform();
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925287 * u2);
    }

    double normal(double mean, double sd) { return mean + sd * normal(); }

    // Poisson count via Knuth multiplication, chunked so the exponential
    // never underflows for large means.
    std::uint64_t poisson(double mean) {
        std::uint64_t total = 0;
        while (mean > 0.0) {
            const double chunk = mean > 60.0 ? 60.0 : mean;
            mean -= chunk;
            const double limit = std::exp(-chunk);
            double prod = uniform();
            std::uint64_t k = 0;
            while (prod > limit) {
                ++k;
                prod *= uniform();
            }
            total += k;
        }
        return total;
    }

    std::uint64_t raw() { return eng_(); }

    // Deterministic substream derivation: mixes a purpose tag and an index
    // into the base seed (splitmix64 finalizer). Distinct (tag, index)
    // pairs give independent streams for parallel study cells.
    static std::uint64_t derive(std::uint64_t base, std::string_view tag,
                                std::uint64_t index = 0) {
        std::uint64_t h = base ^ 0x9e3779b97f4a7c15ull;
        for (char c : tag) h = mix(h ^ static_cast<std::uint64_t>(static_cast<unsigned char>(c)));
        return mix(h ^ mix(index + 0x632be59bd9b4e019ull));
    }

private:
    static std::uint64_t mix(std::uint64_t z) {
        z += 0x9e3779b97f4a7c15ull;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    std::mt19937_64 eng_;
};

}  // namespace cogarch

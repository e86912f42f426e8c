#pragma once

// Deterministic per-sample random streams. A stream is keyed by
// (global_seed, sample_id, stage) so that manifest reordering or worker
// scheduling never changes what a given sample draws.

#include <cstdint>
#include <random>
#include <string_view>

namespace flowgen {

namespace detail {

inline std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t h = 0xcbf29ce484222325ull) {
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

}  // namespace detail

class RngStream {
public:
    explicit RngStream(std::uint64_t seed) : eng_(detail::splitmix64(seed)) {}

    static RngStream derive(std::uint64_t global_seed, std::string_view sample_id,
                            std::string_view stage) {
        std::uint64_t h = 0xcbf29ce484222325ull;
        for (int i = 0; i < 8; ++i) {
            const char b = static_cast<char>((global_seed >> (8 * i)) & 0xff);
            h = detail::fnv1a64({&b, 1}, h);
        }
        h = detail::fnv1a64("\x1f", h);
        h = detail::fnv1a64(sample_id, h);
        h = detail::fnv1a64("\x1f", h);
        h = detail::fnv1a64(stage, h);
        return RngStream(h);
    }

    std::uint64_t next_u64() { return eng_(); }

    // Uniform in [a, b); does not rely on libstdc++ distribution internals,
    // so streams are reproducible across standard libraries.
    double uniform(double a, double b) {
        const double t = (next_u64() >> 11) * 0x1.0p-53;
        return a + t * (b - a);
    }

    int uniform_int(int lo, int hi) {  // inclusive bounds
        const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
        return lo + static_cast<int>(next_u64() % span);
    }

    int sign() { return (next_u64() & 1) ? 1 : -1; }

    bool bernoulli(double p) { return uniform(0.0, 1.0) < p; }

private:
    std::mt19937_64 eng_;
};

}  // namespace flowgen

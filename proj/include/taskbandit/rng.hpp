#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace taskbandit {

// One step of the splitmix64 generator; used only to expand user-facing
// seeds into engine seed material.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

// Deterministic random stream. mt19937_64 supplies the bits (its output
// sequence is fully specified by the standard) and the double / normal /
// bounded-int conversions are done by hand, so the same seed produces the
// same draws on every platform and standard library.
class RandomStream {
public:
    RandomStream() : RandomStream(0) {}

    explicit RandomStream(std::uint64_t seed) {
        std::uint64_t s = seed;
        engine_.seed(splitmix64(s));
    }

    // Independent stream for (seed, stream_tag). Different tags on the same
    // seed give decorrelated streams; used to split policy sampling from
    // environment noise within a trial.
    static RandomStream derive(std::uint64_t seed, std::uint64_t stream_tag) {
        std::uint64_t s = seed ^ ((stream_tag + 1) * 0x9E3779B97F4A7C15ULL);
        std::uint64_t m = splitmix64(s);
        m ^= splitmix64(s);
        RandomStream out;
        out.engine_.seed(m);
        return out;
    }

    std::uint64_t next_u64() { return engine_(); }

    // Uniform in [0, 1), 53-bit resolution.
    double uniform01() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    // Unbiased uniform integer in [0, n).
    int uniform_int(int n) {
        const std::uint64_t bound = static_cast<std::uint64_t>(n);
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
        std::uint64_t x = next_u64();
        while (x >= limit) x = next_u64();
        return static_cast<int>(x % bound);
    }

    // Gaussian draw via Box-Muller; always consumes exactly two words so the
    // stream position does not depend on the parameters.
    double normal(double mean, double stddev) {
        const double u1 = static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;  // (0, 1]
        const double u2 = uniform01();
        constexpr double two_pi = 6.283185307179586476925286766559;
        const double r = std::sqrt(-2.0 * std::log(u1));
        return mean + stddev * (r * std::cos(two_pi * u2));
    }

private:
    std::mt19937_64 engine_;
};

}  // namespace taskbandit

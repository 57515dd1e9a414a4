#pragma once

#include <cstdint>
#include <cmath>
#include <random>
#include <vector>

namespace cytrace {

// Single random source for the whole library so every run is reproducible
// from one seed. Fixed algorithm: mt19937_64 for raw bits, 53-bit mantissa
// scaling for uniforms, Box-Muller (no caching) for normals, rejection
// sampling for bounded integers.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    std::uint64_t next_u64() { return gen_(); }

    // uniform in [0, 1)
    double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // standard normal; consumes exactly two raw draws
    double normal() {
        const double u1 = static_cast<double>((gen_() >> 11) + 1) * 0x1.0p-53;  // (0, 1]
        const double u2 = static_cast<double>(gen_() >> 11) * 0x1.0p-53;
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
    }

    // uniform integer in [0, n), n >= 1, free of modulo bias
    std::uint64_t below(std::uint64_t n) {
        const std::uint64_t rem = (0 - n) % n;  // 2^64 mod n
        std::uint64_t r = gen_();
        while (rem != 0 && r > UINT64_MAX - rem) r = gen_();
        return r % n;
    }

    bool bernoulli(double p) { return uniform() < p; }

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::swap(v[i - 1], v[static_cast<std::size_t>(below(i))]);
        }
    }

private:
    std::mt19937_64 gen_;
};

}  // namespace cytrace

#pragma once

// Self-contained random streams: splitmix64 for seeding, xoshiro256** for the
// generator, Box-Muller for normals. No std::random distributions are used, so
// a (seed, stream) pair produces the same numbers on every platform.

#include <array>
#include <cmath>
#include <cstdint>
#include <vector>

#include "constants.hpp"

namespace kltomo {

struct SplitMix64 {
    std::uint64_t state;
    std::uint64_t next() {
        std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }
};

class Rng {
  public:
    explicit Rng(std::uint64_t seed) { reseed(seed); }

    // Independent stream addressed by (seed, key). Concurrent loops give each
    // task its own key so results do not depend on scheduling.
    Rng(std::uint64_t seed, std::uint64_t key) {
        SplitMix64 sm{seed};
        const std::uint64_t base = sm.next();
        reseed(base ^ (0x9e3779b97f4a7c15ULL * (key + 0x632be59bd9b4e019ULL)));
    }

    std::uint64_t next_u64() {
        const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
        const std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    // Uniform on [0,1) with 53 random bits.
    double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = uniform01();
        while (u1 <= 0.0) u1 = uniform01();
        const double u2 = uniform01();
        const double r = std::sqrt(-2.0 * std::log(u1));
        spare_ = r * std::sin(2.0 * kPi * u2);
        have_spare_ = true;
        return r * std::cos(2.0 * kPi * u2);
    }

    void fill_normal(double* out, int count) {
        for (int k = 0; k < count; ++k) out[k] = normal();
    }

    // Uniform direction on S^{dim-1}.
    std::vector<double> unit_vector(int dim) {
        std::vector<double> v(static_cast<std::size_t>(dim));
        double norm2 = 0.0;
        do {
            fill_normal(v.data(), dim);
            norm2 = 0.0;
            for (double x : v) norm2 += x * x;
        } while (norm2 < 1e-24);
        const double inv = 1.0 / std::sqrt(norm2);
        for (double& x : v) x *= inv;
        return v;
    }

  private:
    void reseed(std::uint64_t seed) {
        SplitMix64 sm{seed};
        for (auto& w : s_) w = sm.next();
        if (s_[0] == 0 && s_[1] == 0 && s_[2] == 0 && s_[3] == 0) s_[0] = 1;
        have_spare_ = false;
        spare_ = 0.0;
    }

    static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

    std::array<std::uint64_t, 4> s_{};
    bool have_spare_ = false;
    double spare_ = 0.0;
};

} // namespace kltomo

#pragma once

// Deterministic random-number streams for Monte Carlo.
//
// RngStream wraps a 64-bit Mersenne Twister and layers on the exact variate
// transforms the simulator needs.  Reproducibility contract: the sequence a
// stream produces is a pure function of how it was constructed, and
// substream(master, k) yields streams that are independent for distinct k —
// per-path substreams make the simulation a deterministic function of
// (seed, paths, config) regardless of path execution order.

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>

#include "special.hpp"

namespace riskpool {

namespace detail {

// splitmix64: the standard 64-bit finalizer-style generator, used only to
// decorrelate substream seeds (a Mersenne Twister seeded with raw nearby
// integers starts in correlated states).
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

}  // namespace detail

class RngStream {
  public:
    explicit RngStream(std::uint64_t seed) : engine_(seed) {}

    // Stream #index derived from a master seed.  Distinct indices land in
    // unrelated regions of the seed space via two splitmix64 rounds.
    static RngStream substream(std::uint64_t master_seed, std::uint64_t index) {
        std::uint64_t state =
            master_seed ^ (0xD1B54A32D192ED03ULL * (index + 1));
        const std::uint64_t a = detail::splitmix64(state);
        const std::uint64_t b = detail::splitmix64(state);
        return RngStream(a ^ (b << 1));
    }

    std::uint64_t raw() { return engine_(); }

    // Uniform on the open interval (0,1): never 0, never 1, so logs and
    // quantile transforms are always finite.
    double uniform01() {
        return (static_cast<double>(raw() >> 11) + 0.5) * 0x1.0p-53;
    }

    double exponential(double rate) {
        if (!(rate > 0.0))
            throw std::invalid_argument("exponential variate: rate must be > 0");
        return -std::log(uniform01()) / rate;
    }

    // Standard normal via the Marsaglia polar method (pairs generated, one
    // cached).  Chosen over library distributions for cross-platform
    // determinism and over quantile inversion for speed.
    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u, v, s;
        do {
            u = 2.0 * uniform01() - 1.0;
            v = 2.0 * uniform01() - 1.0;
            s = u * u + v * v;
        } while (s >= 1.0 || s == 0.0);
        const double f = std::sqrt(-2.0 * std::log(s) / s);
        spare_ = v * f;
        have_spare_ = true;
        return u * f;
    }

    // Gamma(shape, 1) by Marsaglia–Tsang squeeze; shape < 1 handled by the
    // standard boost Gamma(shape+1) * U^{1/shape}.
    double gamma(double shape) {
        if (!(shape > 0.0))
            throw std::invalid_argument("gamma variate: shape must be > 0");
        if (shape < 1.0) {
            const double u = uniform01();
            return gamma(shape + 1.0) * std::pow(u, 1.0 / shape);
        }
        const double d = shape - 1.0 / 3.0;
        const double c = 1.0 / std::sqrt(9.0 * d);
        for (;;) {
            double x, v;
            do {
                x = normal();
                v = 1.0 + c * x;
            } while (v <= 0.0);
            v = v * v * v;
            const double u = uniform01();
            const double x2 = x * x;
            if (u < 1.0 - 0.0331 * x2 * x2) return d * v;
            if (std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) return d * v;
        }
    }

  private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

}  // namespace riskpool

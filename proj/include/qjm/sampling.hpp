#pragma once

#include <cstdint>
#include <optional>
#include <random>

#include "qjm/core.hpp"
#include "qjm/criteria.hpp"

// Seeded generation of random valid observable pairs for fuzzing: bias
// uniform in [-1, 1], direction uniform on the sphere, sharpness uniform in
// [0, 1 - |bias|], plus pairs steered onto the compatibility boundary by
// bisection. All draws go through the pinned mt19937_64 stream so runs are
// reproducible bit for bit.

namespace qjm {

class PairSampler {
  public:
    explicit PairSampler(std::uint64_t seed) : eng_(seed) {}

    double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    Vec3 unit_vector() {
        const double z = uniform(-1.0, 1.0);
        const double phi = 2.0 * M_PI * uniform();
        const double rho = std::sqrt(std::max(1.0 - z * z, 0.0));
        return {rho * std::cos(phi), rho * std::sin(phi), z};
    }

    SimpleObservable observable() {
        const double x = uniform(-1.0, 1.0);
        const double m = uniform(0.0, 1.0 - std::abs(x));
        return SimpleObservable{x, m * unit_vector()};
    }

    std::pair<SimpleObservable, SimpleObservable> pair() { return {observable(), observable()}; }

    // A pair close to the thm1 boundary: shrink the second Bloch vector by
    // bisection until the margin crosses zero. Fails (rarely) when no drawn
    // pair is incompatible at full sharpness.
    std::optional<std::pair<SimpleObservable, SimpleObservable>> boundary_pair(
        int max_attempts = 64) {
        for (int attempt = 0; attempt < max_attempts; ++attempt) {
            const auto [a, b] = pair();
            if (thm1_margin(pair_context(a, b)) >= 0.0) continue;
            double lo = 0.0, hi = 1.0;
            for (int i = 0; i < 60; ++i) {
                const double t = 0.5 * (lo + hi);
                const SimpleObservable bt{b.x, t * b.m};
                (thm1_margin(pair_context(a, bt)) >= 0.0 ? lo : hi) = t;
            }
            return std::make_pair(a, SimpleObservable{b.x, 0.5 * (lo + hi) * b.m});
        }
        return std::nullopt;
    }

  private:
    std::mt19937_64 eng_;
};

}  // namespace qjm

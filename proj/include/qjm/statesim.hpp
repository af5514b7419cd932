#pragma once

#include <cstdint>
#include <random>

#include "qjm/construction.hpp"
#include "qjm/core.hpp"

// Measurement statistics of a joint observable on qubit states: exact
// outcome probabilities, seeded multinomial sampling and an empirical check
// of the marginal constraints.

namespace qjm {

// Density operator (I + r.sigma)/2.
struct QubitState {
    Vec3 r;
};

inline QubitState make_state(const Vec3& r) {
    if (!r.finite() || r.norm() > 1.0 + kValidationEps)
        throw std::invalid_argument("Bloch vector must satisfy |r| <= 1");
    return QubitState{r};
}

// Outcome order used for all four-valued results: (++), (+-), (-+), (--).
inline constexpr std::array<std::pair<Sign, Sign>, 4> kOutcomeOrder{
    {{Sign::Plus, Sign::Plus},
     {Sign::Plus, Sign::Minus},
     {Sign::Minus, Sign::Plus},
     {Sign::Minus, Sign::Minus}}};

// p(mu, nu) = tr[(I + r.sigma)/2 (c0 I + c.sigma)] = c0 + c.r
inline std::array<double, 4> outcome_probabilities(const JointObservable& j,
                                                   const QubitState& st) {
    std::array<double, 4> p{};
    for (std::size_t k = 0; k < 4; ++k) {
        const Effect& e = j.effect(kOutcomeOrder[k].first, kOutcomeOrder[k].second);
        p[k] = e.c0 + e.c.dot(st.r);
    }
    return p;
}

namespace detail {

// Uniform double in [0, 1) from the top 53 bits; identical across platforms
// since the mt19937_64 stream itself is standard-pinned.
inline double uniform01(std::mt19937_64& eng) {
    return static_cast<double>(eng() >> 11) * 0x1.0p-53;
}

}  // namespace detail

// N multinomial draws by cumulative inversion. Deterministic given the seed.
inline std::array<std::uint64_t, 4> sample_outcomes(const JointObservable& j,
                                                    const QubitState& st, std::uint64_t n_draws,
                                                    std::uint64_t seed) {
    const std::array<double, 4> p = outcome_probabilities(j, st);
    std::array<double, 3> cum{};
    double acc = 0.0;
    for (std::size_t k = 0; k < 3; ++k) {
        acc += std::max(p[k], 0.0);
        cum[k] = acc;
    }
    std::array<std::uint64_t, 4> counts{};
    std::mt19937_64 eng(seed);
    for (std::uint64_t i = 0; i < n_draws; ++i) {
        const double u = detail::uniform01(eng);
        std::size_t k = 3;  // final bucket absorbs all rounding
        if (u < cum[0])
            k = 0;
        else if (u < cum[1])
            k = 1;
        else if (u < cum[2])
            k = 2;
        ++counts[k];
    }
    return counts;
}

// ---------------------------------------------------------------------------
// Marginal z-scores: observed row/column counts against the analytic
// single-observable probabilities (1 + mu x + mu m.r)/2. A deterministic
// outcome (p equal to 0 or 1) scores 0 when the counts match it exactly.
// ---------------------------------------------------------------------------

struct MarginalCheckReport {
    double z_a_plus = 0, z_a_minus = 0, z_b_plus = 0, z_b_minus = 0;
    double max_abs_z = 0;
    std::uint64_t total = 0;

    bool pass(double threshold) const { return max_abs_z <= threshold; }
};

inline MarginalCheckReport empirical_marginal_check(const std::array<std::uint64_t, 4>& counts,
                                                    const SimpleObservable& a,
                                                    const SimpleObservable& b,
                                                    const QubitState& st) {
    MarginalCheckReport rep;
    rep.total = counts[0] + counts[1] + counts[2] + counts[3];
    const double n = static_cast<double>(rep.total);
    auto zscore = [n](std::uint64_t k, double p) {
        const double var = n * p * (1.0 - p);
        if (var <= 0.0)
            return static_cast<double>(k) == n * p ? 0.0
                                                   : std::numeric_limits<double>::infinity();
        return (static_cast<double>(k) - n * p) / std::sqrt(var);
    };
    const double pa = effect_of(a, Sign::Plus).c0 + effect_of(a, Sign::Plus).c.dot(st.r);
    const double pb = effect_of(b, Sign::Plus).c0 + effect_of(b, Sign::Plus).c.dot(st.r);
    rep.z_a_plus = zscore(counts[0] + counts[1], pa);
    rep.z_a_minus = zscore(counts[2] + counts[3], 1.0 - pa);
    rep.z_b_plus = zscore(counts[0] + counts[2], pb);
    rep.z_b_minus = zscore(counts[1] + counts[3], 1.0 - pb);
    rep.max_abs_z = std::max({std::abs(rep.z_a_plus), std::abs(rep.z_a_minus),
                              std::abs(rep.z_b_plus), std::abs(rep.z_b_minus)});
    return rep;
}

}  // namespace qjm

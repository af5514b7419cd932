#pragma once

#include <algorithm>
#include <vector>

#include "qjm/core.hpp"
#include "qjm/criteria.hpp"

// Algebraic identities tying the derived pair quantities together. Each one
// holds exactly in real arithmetic; the accumulated residuals measure only
// floating-point error and gate the identity suite at 1e-10 relative.

namespace qjm {

struct IdentityResiduals {
    double f_ratio = 0;        // x^2/F^2 + m^2/(1-F^2) = 1 (both observables)
    double d_vs_delta = 0;     // 2 d(mu,nu) = Delta(-mu nu) + a(mu) + b(nu)
    double quartic = 0;        // s^2 a b Delta = s^4 D^2 + s^2 R (L^2 - s^2)
    double s2r_product = 0;    // s^2 R = (gamma^2 - f-)(f+ - gamma^2)
    double f_minus_rewrite = 0;
    double bs55_vs_r = 0;      // condition-55 margin = 4 s^2 R
    long bs55_sign_mismatch = 0;
    long samples = 0;

    double max_residual() const {
        return std::max({f_ratio, d_vs_delta, quartic, s2r_product, f_minus_rewrite, bs55_vs_r});
    }

    void update(const PairContext& c) {
        ++samples;
        auto rel = [](double lhs, double rhs) {
            return std::abs(lhs - rhs) / std::max({1.0, std::abs(lhs), std::abs(rhs)});
        };

        if (c.one_minus_Fx2 > 0.0)
            f_ratio = std::max(f_ratio,
                               std::abs(c.ratio_x + c.m * c.m / c.one_minus_Fx2 - 1.0));
        if (c.one_minus_Fy2 > 0.0)
            f_ratio = std::max(f_ratio,
                               std::abs(c.ratio_y + c.n * c.n / c.one_minus_Fy2 - 1.0));

        for (Sign mu : kSigns)
            for (Sign nu : kSigns)
                d_vs_delta = std::max(
                    d_vs_delta,
                    rel(2.0 * c.d(mu, nu), c.Delta(-(mu * nu)) + c.a(mu) + c.b(nu)));

        if (c.s2 > 0.0) {
            for (Sign mu : kSigns) {
                for (Sign nu : kSigns) {
                    const double lhs = c.s2 * c.a(mu) * c.b(nu) * c.Delta(mu * nu);
                    const double rhs = c.s2 * c.s2 * c.D(mu, nu) * c.D(mu, nu) +
                                       c.s2 * c.R * (c.L(mu, nu).norm2() - c.s2);
                    quartic = std::max(quartic, rel(lhs, rhs));
                }
            }
            const double g2 = c.gamma * c.gamma;
            s2r_product = std::max(s2r_product,
                                   rel(c.s2 * c.R, (g2 - c.f_minus) * (c.f_plus - g2)));

            const double abprod = std::max(c.a(Sign::Plus) * c.a(Sign::Minus) *
                                               c.b(Sign::Plus) * c.b(Sign::Minus),
                                           0.0);
            const double rewrite =
                0.5 * ((c.a(Sign::Plus) + 2.0 * c.x) * (c.b(Sign::Plus) + 2.0 * c.y) -
                       std::sqrt(abprod)) +
                c.m * c.m + c.n * c.n - 1.0;
            f_minus_rewrite = std::max(f_minus_rewrite, rel(c.f_minus, rewrite));

            const double m55 = bs_condition55_margin(c);
            const double s2r4 = 4.0 * c.s2 * c.R;
            bs55_vs_r = std::max(bs55_vs_r, rel(m55, s2r4));
            if (std::min(std::abs(m55), std::abs(s2r4)) > 1e-12 && (m55 > 0) != (s2r4 > 0))
                ++bs55_sign_mismatch;
        }
    }

    bool pass(double bound = 1e-10) const {
        return max_residual() <= bound && bs55_sign_mismatch == 0;
    }
};

struct IdentityRow {
    const char* name;
    double residual;
};

inline std::vector<IdentityRow> identity_rows(const IdentityResiduals& r) {
    return {{"fx_ratio_sum", r.f_ratio},
            {"two_d_vs_delta_a_b", r.d_vs_delta},
            {"quartic_discriminant", r.quartic},
            {"s2r_factorization", r.s2r_product},
            {"f_minus_rewrite", r.f_minus_rewrite},
            {"bs55_equals_4s2r", r.bs55_vs_r}};
}

}  // namespace qjm

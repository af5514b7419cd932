#pragma once

#include <vector>

#include "qjm/core.hpp"
#include "qjm/criteria.hpp"

// Quantitative outputs: admissible-region boundaries, sharpness trade-off
// curves, critical sharpnesses and the unsharpness trade-off inequality.
//
// The admissible set of n for fixed (x, m, y) depends on n only through its
// length and its angle to m, so every scan works in (theta, n) coordinates;
// the full 3-D region is the corresponding surface of revolution about m.

namespace qjm {

struct not_orthogonal : std::runtime_error {
    using std::runtime_error::runtime_error;
};

namespace detail {

inline constexpr int kBisectIters = 50;
inline constexpr double kBisectTol = 1e-12;

// Context for a partner at angle theta from m with sharpness n.
inline PairContext angled_context(double x, const Vec3& m_vec, double y, double n,
                                  double cos_theta) {
    const double m_len = m_vec.norm();
    Vec3 e1 = m_len > 0.0 ? m_vec / m_len : Vec3{1, 0, 0};
    Vec3 e2{0, 1, 0};
    if (m_len > 0.0) {
        Vec3 t{0, 1, 0};
        if (std::abs(e1.y) > std::abs(e1.x)) t = Vec3{1, 0, 0};
        e2 = normalized(t - t.dot(e1) * e1);
    }
    const double sin_theta = std::sqrt(std::max(1.0 - cos_theta * cos_theta, 0.0));
    const Vec3 nv = n * (cos_theta * e1 + sin_theta * e2);
    return pair_context(SimpleObservable{x, m_vec}, SimpleObservable{y, nv});
}

// Largest n in [0, 1-|y|] kept jointly measurable by `which`, located by
// bisection on the criterion margin (the compatible set along the ray is the
// interval [0, n_max]).
inline double max_sharpness_at_angle(double x, const Vec3& m_vec, double y, double cos_theta,
                                     Criterion which, double tol) {
    const double cap = 1.0 - std::abs(y);
    auto margin = [&](double n) {
        return jm_criterion(which, angled_context(x, m_vec, y, n, cos_theta), 0.0).margin;
    };
    if (margin(cap) >= 0.0) return cap;
    double lo = 0.0, hi = cap;
    for (int i = 0; i < kBisectIters && hi - lo > std::min(tol, kBisectTol); ++i) {
        const double mid = 0.5 * (lo + hi);
        (margin(mid) >= 0.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Critical sharpness n_c: the largest n such that every partner of bias y
// with sharpness <= n_c is compatible with (x, m), attained along the
// gamma = 0 direction, where n_c^2/Fx^2 + y^2/(1-Fx^2) = 1. When
// |y| >= 1 - Fx^2 the constraint never binds and every admissible n (up to
// 1 - |y|) is compatible.
// ---------------------------------------------------------------------------

inline double critical_nc(double x, double m, double y) {
    const auto p = detail::f_pieces(x, m);
    const double cap = 1.0 - std::abs(y);
    if (std::abs(y) >= p.one_minus_F2) return cap;
    const double nc = p.F * std::sqrt(1.0 - y * y / p.one_minus_F2);
    return std::min(nc, cap);
}

// ---------------------------------------------------------------------------
// Admissible-boundary scan at fixed (x, m, y): n_max over a uniform grid of
// angles in [0, pi], the half-angles of the forward/backward cones on which
// n_max saturates at 1 - |y|, and the all-admissible flag (guaranteed when
// 1 - Fx^2 <= |y|).
// ---------------------------------------------------------------------------

struct BoundaryScan {
    double x = 0;
    Vec3 m;
    double y = 0;
    double tol = 0;
    std::vector<std::pair<double, double>> samples;  // (theta, n_max)
    double forward_cone = 0.0;   // half-angle around theta = 0, 0 if empty
    double backward_cone = 0.0;  // half-angle around theta = pi, 0 if empty
    bool all_admissible = false;
};

inline BoundaryScan boundary_scan(double x, const Vec3& m_vec, double y, int n_angles,
                                  double tol = kDefaultTol,
                                  Criterion which = Criterion::Thm1) {
    if (n_angles < 1) throw std::invalid_argument("boundary_scan needs at least one angle");
    if (std::abs(y) > 1.0) throw std::invalid_argument("|y| must not exceed 1");
    make_observable(x, m_vec);  // validate

    BoundaryScan scan;
    scan.x = x;
    scan.m = m_vec;
    scan.y = y;
    scan.tol = tol;
    const double cap = 1.0 - std::abs(y);
    const double m_len = m_vec.norm();

    scan.samples.reserve(static_cast<std::size_t>(n_angles));
    for (int i = 0; i < n_angles; ++i) {
        const double theta =
            n_angles == 1 ? 0.0 : M_PI * static_cast<double>(i) / (n_angles - 1);
        scan.samples.emplace_back(
            theta, detail::max_sharpness_at_angle(x, m_vec, y, std::cos(theta), which, tol));
    }

    // On the circle n = cap the margin is (m n cos(theta) - x y)^2 - f- with
    // f- independent of theta, so the cone edges have the closed form
    // cos(theta) = (x y +- sqrt(f-))/(m n). Everything is admissible when
    // 1 - Fx^2 <= |y|, when f- <= 0, or when the excluded cos(theta)
    // interval misses [-1, 1].
    const auto px = detail::f_pieces(x, m_len);
    const double fm = detail::angled_context(x, m_vec, y, cap, 1.0).f_minus;
    scan.all_admissible = px.one_minus_F2 <= std::abs(y) || fm <= 0.0;
    double c_fwd = -1.0, c_bwd = 1.0;
    if (!scan.all_admissible) {
        const double root = std::sqrt(fm);
        c_fwd = (x * y + root) / (m_len * cap);
        c_bwd = (x * y - root) / (m_len * cap);
        if (c_bwd >= 1.0 || c_fwd <= -1.0) scan.all_admissible = true;
    }
    if (scan.all_admissible) {
        scan.forward_cone = M_PI;
        scan.backward_cone = M_PI;
        return scan;
    }
    scan.forward_cone = c_fwd <= 1.0 ? std::acos(std::max(c_fwd, -1.0)) : 0.0;
    scan.backward_cone = c_bwd >= -1.0 ? M_PI - std::acos(std::min(c_bwd, 1.0)) : 0.0;
    return scan;
}

// ---------------------------------------------------------------------------
// Sharpness trade-off at fixed (x, y, cos theta): n_max as a function of m
// over [0, 1 - |x|], plus the critical sharpness m0 below which n is
// unconstrained (n_max = 1 - |y|).
// ---------------------------------------------------------------------------

struct TradeoffCurve {
    double x = 0, y = 0, cos_theta = 0, tol = 0;
    std::vector<std::pair<double, double>> samples;  // (m, n_max)
    double m0 = 0.0;
};

inline TradeoffCurve tradeoff_curve(double x, double y, double cos_theta, int m_grid,
                                    double tol = kDefaultTol,
                                    Criterion which = Criterion::Thm1) {
    if (std::abs(cos_theta) > 1.0) throw std::invalid_argument("|cos theta| must not exceed 1");
    if (std::abs(x) > 1.0 || std::abs(y) > 1.0)
        throw std::invalid_argument("biases must lie in [-1, 1]");
    if (m_grid < 2) throw std::invalid_argument("tradeoff_curve needs at least two grid points");

    TradeoffCurve curve;
    curve.x = x;
    curve.y = y;
    curve.cos_theta = cos_theta;
    curve.tol = tol;
    const double m_cap = 1.0 - std::abs(x);
    const double n_cap = 1.0 - std::abs(y);
    const Vec3 axis{1, 0, 0};

    curve.samples.reserve(static_cast<std::size_t>(m_grid));
    for (int i = 0; i < m_grid; ++i) {
        const double m = m_cap * static_cast<double>(i) / (m_grid - 1);
        curve.samples.emplace_back(
            m, detail::max_sharpness_at_angle(x, m * axis, y, cos_theta, which, tol));
    }

    // m0: largest m whose whole admissible-n interval stays compatible.
    auto cap_margin = [&](double m) {
        return jm_criterion(which, detail::angled_context(x, m * axis, y, n_cap, cos_theta), 0.0)
            .margin;
    };
    if (cap_margin(m_cap) >= 0.0) {
        curve.m0 = m_cap;
    } else {
        double lo = 0.0, hi = m_cap;
        for (int i = 0; i < detail::kBisectIters && hi - lo > detail::kBisectTol; ++i) {
            const double mid = 0.5 * (lo + hi);
            (cap_margin(mid) >= 0.0 ? lo : hi) = mid;
        }
        curve.m0 = 0.5 * (lo + hi);
    }
    return curve;
}

// ---------------------------------------------------------------------------
// No-trade-off conditions.
//   sharpness: (1 + sgn[x y] cos theta)(1 - |x|)(1 - |y|) <= 2 |x y|
//   bias:      m + n + |m +- n| <= 2 for both signs
// ---------------------------------------------------------------------------

struct NoTradeoffFlags {
    bool sharpness = false;
    bool bias = false;
};

inline NoTradeoffFlags no_tradeoff_conditions(double x, double y, double m, double n,
                                              double cos_theta) {
    NoTradeoffFlags f;
    const double sgn_xy = to_real(sign_of(x * y));
    f.sharpness =
        (1.0 + sgn_xy * cos_theta) * (1.0 - std::abs(x)) * (1.0 - std::abs(y)) <=
        2.0 * std::abs(x * y);
    const double cross = 2.0 * m * n * cos_theta;
    const double plus = std::sqrt(std::max(m * m + n * n + cross, 0.0));
    const double minus = std::sqrt(std::max(m * m + n * n - cross, 0.0));
    f.bias = (m + n + plus <= 2.0) && (m + n + minus <= 2.0);
    return f;
}

inline NoTradeoffFlags no_tradeoff_conditions(const SimpleObservable& a,
                                              const SimpleObservable& b) {
    const double m = a.m.norm(), n = b.m.norm();
    const double ct = (m > 0.0 && n > 0.0) ? a.m.dot(b.m) / (m * n) : 1.0;
    return no_tradeoff_conditions(a.x, b.x, m, n, std::clamp(ct, -1.0, 1.0));
}

// ---------------------------------------------------------------------------
// Unsharpness trade-off for orthogonal pairs (gamma = 0). With
// D1 = Q1 m + P1 |x| and D2 = Q2 n + P2 |y|, compatibility forces
//   D1^2 (Q2^2 - P2^2) + D2^2 (Q1^2 - P1^2) + P1^2 P2^2 <= Q1^2 Q2^2;
// the returned residual is the slack of that inequality.
// ---------------------------------------------------------------------------

inline double mur_check(const PairContext& c, double Q1, double P1, double Q2, double P2) {
    if (std::abs(c.gamma) > 1e-9)
        throw not_orthogonal("unsharpness trade-off needs gamma = m.n - xy = 0");
    if (P1 < 0.0 || P2 < 0.0 || P1 > Q1 || P2 > Q2)
        throw std::invalid_argument("weights must satisfy 0 <= P <= Q");
    const double d1 = Q1 * c.m + P1 * std::abs(c.x);
    const double d2 = Q2 * c.n + P2 * std::abs(c.y);
    return Q1 * Q1 * Q2 * Q2 - d1 * d1 * (Q2 * Q2 - P2 * P2) -
           d2 * d2 * (Q1 * Q1 - P1 * P1) - P1 * P1 * P2 * P2;
}

}  // namespace qjm

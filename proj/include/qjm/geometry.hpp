#pragma once

#include <optional>
#include <vector>

#include "qjm/construction.hpp"
#include "qjm/core.hpp"
#include "qjm/criteria.hpp"

// Plane geometry behind the compatibility criteria: the four elliptical
// regions, the four-focus oval, ellipse-ellipse intersection points and a
// brute-force feasibility oracle that decides joint measurability with no
// reference to the closed-form criteria.

namespace qjm {

struct degenerate_geometry : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Orthonormal basis of the plane spanned by m and n. e1 follows m when
// m != 0, else n, else the first axis; e2 completes it deterministically.
// ---------------------------------------------------------------------------

struct PlaneFrame {
    Vec3 e1, e2;

    Vec3 embed(double u, double v) const { return u * e1 + v * e2; }
    std::pair<double, double> project(const Vec3& p) const { return {p.dot(e1), p.dot(e2)}; }

    static PlaneFrame of_pair(const PairContext& c) {
        PlaneFrame f;
        if (c.m > 0.0)
            f.e1 = c.mv / c.m;
        else if (c.n > 0.0)
            f.e1 = c.nv / c.n;
        else
            f.e1 = Vec3{1, 0, 0};
        Vec3 w = c.nv - c.nv.dot(f.e1) * f.e1;
        if (w.norm() <= 1e-14) {
            // Take the coordinate axis least aligned with e1.
            Vec3 t{1, 0, 0};
            if (std::abs(f.e1.y) < std::abs(f.e1.x)) t = Vec3{0, 1, 0};
            if (std::abs(f.e1.z) < std::abs(t.dot(f.e1))) t = Vec3{0, 0, 1};
            w = t - t.dot(f.e1) * f.e1;
        }
        f.e2 = normalized(w);
        return f;
    }
};

// ---------------------------------------------------------------------------
// Region specifications. Membership margin is bound - sum of focal distances,
// so all three kinds share one convex membership test.
//   Ex(mu): foci +-m + mu n, bound 2(1 - mu x)
//   Ey(nu): foci nu m +- n,  bound 2(1 - nu y)
//   E4:     all four q(mu, nu), bound 4
// ---------------------------------------------------------------------------

enum class RegionKind { Ex, Ey, E4 };

struct RegionSpec {
    RegionKind kind = RegionKind::E4;
    Sign index = Sign::Plus;  // mu for Ex, nu for Ey; unused for E4
    std::array<Vec3, 4> foci{};
    int focus_count = 0;
    double bound = 0.0;

    static RegionSpec ex(Sign mu, const PairContext& c) {
        RegionSpec r;
        r.kind = RegionKind::Ex;
        r.index = mu;
        r.foci = {c.q(Sign::Plus, mu), c.q(Sign::Minus, mu), {}, {}};
        r.focus_count = 2;
        r.bound = 2.0 * c.A(mu);
        return r;
    }
    static RegionSpec ey(Sign nu, const PairContext& c) {
        RegionSpec r;
        r.kind = RegionKind::Ey;
        r.index = nu;
        r.foci = {c.q(nu, Sign::Plus), c.q(nu, Sign::Minus), {}, {}};
        r.focus_count = 2;
        r.bound = 2.0 * c.B(nu);
        return r;
    }
    static RegionSpec oval(const PairContext& c) {
        RegionSpec r;
        r.kind = RegionKind::E4;
        r.foci = {c.q(Sign::Plus, Sign::Plus), c.q(Sign::Plus, Sign::Minus),
                  c.q(Sign::Minus, Sign::Plus), c.q(Sign::Minus, Sign::Minus)};
        r.focus_count = 4;
        r.bound = 4.0;
        return r;
    }
};

// Signed membership margin; >= 0 means member.
inline double in_region(const RegionSpec& r, const Vec3& z) {
    double sum = 0.0;
    for (int i = 0; i < r.focus_count; ++i) sum += (z - r.foci[i]).norm();
    return r.bound - sum;
}

// Margin of membership in all four elliptical regions at once (the feasible
// set of the joint-observable problem). The four regions share the same four
// foci, so one distance evaluation per focus suffices.
inline double feasibility_margin(const PairContext& c, const Vec3& z) {
    const double dpp = (z - c.q(Sign::Plus, Sign::Plus)).norm();
    const double dpm = (z - c.q(Sign::Plus, Sign::Minus)).norm();
    const double dmp = (z - c.q(Sign::Minus, Sign::Plus)).norm();
    const double dmm = (z - c.q(Sign::Minus, Sign::Minus)).norm();
    const double ex_p = 2.0 * c.A(Sign::Plus) - (dpp + dmp);
    const double ex_m = 2.0 * c.A(Sign::Minus) - (dpm + dmm);
    const double ey_p = 2.0 * c.B(Sign::Plus) - (dpp + dpm);
    const double ey_m = 2.0 * c.B(Sign::Minus) - (dmp + dmm);
    return std::min({ex_p, ex_m, ey_p, ey_m});
}

// ---------------------------------------------------------------------------
// Boundary intersections of Ex(mu) and Ey(nu). Both points are found from
// the shared focus q(nu, mu): the focal distance r solves
//   (L^2 - s^2) r^2 - 2 r K.L + K^2 = 0,
// whose roots are d + (s^2 D +- sqrt(s^2 a b Delta)) / (L^2 - s^2); then
//   s^2 r_vec = (K - r L) x s.
// Empty exactly when Delta_{mu*nu} < 0.
// ---------------------------------------------------------------------------

inline std::vector<Vec3> ellipse_intersections(Sign mu, Sign nu, const PairContext& c) {
    if (c.s == 0.0)
        throw degenerate_geometry("ellipse intersections need linearly independent m, n");
    std::vector<Vec3> out;
    const double delta = c.Delta(mu * nu);
    if (delta < 0.0) return out;
    const Vec3& L = c.L(mu, nu);
    const Vec3& K = c.K(mu, nu);
    const double den = L.norm2() - c.s2;
    const double disc = std::sqrt(std::max(c.s2 * c.a(mu) * c.b(nu) * delta, 0.0));
    const double r_hi = c.d(mu, nu) + (c.s2 * c.D(mu, nu) + disc) / den;
    const double r_lo = c.d(mu, nu) + (c.s2 * c.D(mu, nu) - disc) / den;
    out.push_back(c.q(nu, mu) + (K - r_hi * L).cross(c.sv) / c.s2);
    if (r_hi - r_lo > 1e-14)
        out.push_back(c.q(nu, mu) + (K - r_lo * L).cross(c.sv) / c.s2);
    return out;
}

// ---------------------------------------------------------------------------
// Feasibility probing: exact candidate witnesses first (they cover every
// jointly measurable pair class), then a coarse-to-fine grid over the disk
// |z| <= 2 in the spanning plane. Grid resolution only limits certification
// of infeasibility near the boundary.
// ---------------------------------------------------------------------------

struct FeasibilityProbe {
    Vec3 best_point;
    double best_margin = -std::numeric_limits<double>::infinity();
    bool feasible = false;
};

namespace detail {

inline void probe_point(const PairContext& c, const Vec3& z, FeasibilityProbe& p) {
    if (!z.finite()) return;
    const double m = feasibility_margin(c, z);
    if (m > p.best_margin) {
        p.best_margin = m;
        p.best_point = z;
    }
}

inline std::vector<Vec3> witness_candidates(const PairContext& c) {
    std::vector<Vec3> cand;
    cand.reserve(24);
    if (c.s > 0.0) cand.push_back(c.g);
    cand.push_back(c.mv);
    cand.push_back(-c.mv);
    cand.push_back(c.nv);
    cand.push_back(-c.nv);
    cand.push_back(Vec3{});
    // product-construction point (the exact witness when s = 0)
    cand.push_back(c.y * c.mv + c.x * c.nv);
    // degenerate-construction points
    for (Sign tau : kSigns) {
        const double e = to_real(sign_of(c.x - to_real(tau) * c.y));
        cand.push_back(e * (c.nv - to_real(tau) * c.mv));
    }
    if (c.s > 0.0) {
        for (Sign eta : kSigns)
            for (Sign tau : kSigns) cand.push_back(construction_witness_z(c, eta, tau));
        for (Sign mu : kSigns) {
            for (Sign nu : kSigns) {
                const auto pts = ellipse_intersections(mu, nu, c);
                for (const Vec3& z : pts) cand.push_back(z);
                if (pts.size() == 2) cand.push_back(0.5 * (pts[0] + pts[1]));
            }
        }
    }
    return cand;
}

}  // namespace detail

// grid_step is the finest resolution; the initial sweep runs at
// grid_step * 2^refine_levels and each refinement halves the step around the
// best point seen so far (the feasibility margin is concave on the plane).
inline FeasibilityProbe probe_feasibility(const PairContext& c, double grid_step = 2e-3,
                                          int refine_levels = 3) {
    FeasibilityProbe p;
    for (const Vec3& z : detail::witness_candidates(c)) {
        detail::probe_point(c, z, p);
        if (p.best_margin >= 0.0) {
            p.feasible = true;
            return p;
        }
    }
    const PlaneFrame frame = PlaneFrame::of_pair(c);
    double step = grid_step * std::pow(2.0, refine_levels);
    constexpr double kRadius = 2.0;  // every region fits in |z| <= 2
    for (double u = -kRadius; u <= kRadius; u += step) {
        for (double v = -kRadius; v <= kRadius; v += step) {
            if (u * u + v * v > kRadius * kRadius + step) continue;
            detail::probe_point(c, frame.embed(u, v), p);
        }
    }
    for (int level = 0; level < refine_levels; ++level) {
        const auto [cu, cv] = frame.project(p.best_point);
        const double span = 3.0 * step;
        step *= 0.5;
        for (double u = cu - span; u <= cu + span; u += step)
            for (double v = cv - span; v <= cv + span; v += step)
                detail::probe_point(c, frame.embed(u, v), p);
    }
    p.feasible = p.best_margin >= 0.0;
    return p;
}

// A point of the feasible region, when one exists within probing resolution.
inline std::optional<Vec3> feasible_point(const PairContext& c) {
    const FeasibilityProbe p = probe_feasibility(c);
    if (p.feasible) return p.best_point;
    return std::nullopt;
}

// Geometric verdict: margin is the best feasibility margin probed. Decisions
// within a resolution-dependent band of the true boundary are unreliable;
// callers should compare only pairs with a criterion margin clear of zero.
inline Verdict oracle_jm(const PairContext& c, double grid_step, int refine_levels) {
    const FeasibilityProbe p = probe_feasibility(c, grid_step, refine_levels);
    return Verdict{p.feasible ? Decision::JointlyMeasurable : Decision::NotJointlyMeasurable,
                   p.best_margin};
}

}  // namespace qjm

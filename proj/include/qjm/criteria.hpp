#pragma once

#include <algorithm>
#include <string>

#include "qjm/core.hpp"

// Four closed-form joint-measurability criteria over a PairContext. All of
// them return a signed margin (positive means jointly measurable) wrapped in
// a ternary Verdict, so boundary roots can be located by bisection on any of
// them and fuzz comparisons can exclude a tolerance band around zero.

namespace qjm {

enum class Decision { JointlyMeasurable, NotJointlyMeasurable, Boundary };

inline const char* to_string(Decision d) {
    switch (d) {
        case Decision::JointlyMeasurable: return "JointlyMeasurable";
        case Decision::NotJointlyMeasurable: return "NotJointlyMeasurable";
        case Decision::Boundary: return "Boundary";
    }
    return "?";
}

struct Verdict {
    Decision decision = Decision::Boundary;
    double margin = 0.0;
    std::string diag;  // optional notes (e.g. clamped radicands)

    bool compatible() const { return decision != Decision::NotJointlyMeasurable; }
};

inline Verdict make_verdict(double margin, double tol, std::string diag = {}) {
    Decision d = Decision::Boundary;
    if (std::abs(margin) > tol)
        d = margin > 0.0 ? Decision::JointlyMeasurable : Decision::NotJointlyMeasurable;
    return Verdict{d, margin, std::move(diag)};
}

// ---------------------------------------------------------------------------
// Single-inequality criterion: gamma^2 >= (1-Fx^2-Fy^2)(1-x^2/Fx^2-y^2/Fy^2),
// total on the whole valid domain via the F = 0 limit handled in PairContext.
// ---------------------------------------------------------------------------

inline double thm1_margin(const PairContext& c) {
    return c.gamma * c.gamma - c.f_minus;
}

inline Verdict jm_thm1(const PairContext& c, double tol = kDefaultTol) {
    return make_verdict(thm1_margin(c), tol);
}

// Specialization oracle for unbiased pairs: 1 + (m.n)^2 - m^2 - n^2.
inline double unbiased_condition(const Vec3& m, const Vec3& n) {
    const double cdot = m.dot(n);
    return 1.0 + cdot * cdot - m.norm2() - n.norm2();
}

// ---------------------------------------------------------------------------
// Disjunctive criterion for s > 0: max{|alpha|, |beta|} >= 1, or the sum of
// the four distances |m +- n +- g| is at most 4. The second disjunct is also
// evaluated in its algebraic form R >= 0; both must agree in decision, which
// the fuzz harness checks outside the tolerance band.
// ---------------------------------------------------------------------------

inline double thm2_four_sum(const PairContext& c) {
    double sum = 0.0;
    for (Sign nu : kSigns) {
        sum += (c.mv + c.nv + to_real(nu) * c.g).norm();
        sum += (c.mv - c.nv + to_real(nu) * c.g).norm();
    }
    return sum;
}

inline Verdict jm_thm2(const PairContext& c, double tol = kDefaultTol) {
    if (c.s == 0.0) {
        // Parallel Bloch vectors: always jointly measurable (product
        // observable); alpha/beta are undefined here.
        return Verdict{Decision::JointlyMeasurable, 1.0, "s=0: product case"};
    }
    const double m_ab = c.max_alpha_beta() - 1.0;
    const double m_sum = 4.0 - thm2_four_sum(c);
    return make_verdict(std::max(m_ab, m_sum), tol);
}

// Decision of the equivalent max{|alpha|,|beta|} >= 1 or R >= 0 form.
inline double thm2_r_form_margin(const PairContext& c) {
    if (c.s == 0.0) return 1.0;
    return std::max(c.max_alpha_beta() - 1.0, c.R);
}

// ---------------------------------------------------------------------------
// Square-root-form criterion: C1: sqrt(1-|y|) <= Fx; C2: not C1 and
// |gamma| >= l; C3: not C1, |gamma| < l, h+- >= 0 and
// sqrt(a+ h-) + sqrt(a- h+) >= 2s. Negative radicands in l are clamped to 0
// and recorded in the verdict diagnostics.
// ---------------------------------------------------------------------------

inline Verdict jm_srh(const PairContext& c, double tol = kDefaultTol) {
    const double root = std::sqrt(1.0 - std::abs(c.y));
    const double m1 = c.Fx - root;
    const double m2 = std::min(-m1, std::abs(c.gamma) - c.l);
    const double sum3 = std::sqrt(std::max(c.a(Sign::Plus) * c.h_minus, 0.0)) +
                        std::sqrt(std::max(c.a(Sign::Minus) * c.h_plus, 0.0)) - 2.0 * c.s;
    const double m3 = std::min({-m1, c.l - std::abs(c.gamma), c.h_plus, c.h_minus, sum3});
    std::string diag;
    if (c.l_clamped) diag = "l radicand clamped to 0";
    return make_verdict(std::max({m1, m2, m3}), tol, std::move(diag));
}

// ---------------------------------------------------------------------------
// Quadratic-form criterion: one of
//   4 Delta+ s^2 <= a+ b+ (L--^2 - s^2)
//   4 Delta+ s^2 <= a- b- (L++^2 - s^2)
//   4 Delta+ s^2 <= 2 P Q (s^2 - L++.L--) - P^2 (L--^2 - s^2) - Q^2 (L++^2 - s^2)
// with P = A+ B+ - m.n, Q = A- B- - m.n. The third line equals 4 s^2 R
// identically, which the identity suite verifies.
// ---------------------------------------------------------------------------

inline double bs_condition55_margin(const PairContext& c) {
    const double P = c.A(Sign::Plus) * c.B(Sign::Plus) - c.cdot;
    const double Q = c.A(Sign::Minus) * c.B(Sign::Minus) - c.cdot;
    const Vec3& lpp = c.L(Sign::Plus, Sign::Plus);
    const Vec3& lmm = c.L(Sign::Minus, Sign::Minus);
    const double rhs = 2.0 * P * Q * (c.s2 - lpp.dot(lmm)) - P * P * (lmm.norm2() - c.s2) -
                       Q * Q * (lpp.norm2() - c.s2);
    return rhs - 4.0 * c.Delta(Sign::Plus) * c.s2;
}

inline Verdict jm_bs(const PairContext& c, double tol = kDefaultTol) {
    const double lhs = 4.0 * c.Delta(Sign::Plus) * c.s2;
    const double m53 =
        c.a(Sign::Plus) * c.b(Sign::Plus) * (c.L(Sign::Minus, Sign::Minus).norm2() - c.s2) - lhs;
    const double m54 =
        c.a(Sign::Minus) * c.b(Sign::Minus) * (c.L(Sign::Plus, Sign::Plus).norm2() - c.s2) - lhs;
    const double m55 = bs_condition55_margin(c);
    return make_verdict(std::max({m53, m54, m55}), tol);
}

// ---------------------------------------------------------------------------
// Uniform handle over the four criteria (CLI boundary tracing, fuzz).
// ---------------------------------------------------------------------------

enum class Criterion { Thm1, Thm2, Srh, Bs };

inline const char* to_string(Criterion c) {
    switch (c) {
        case Criterion::Thm1: return "thm1";
        case Criterion::Thm2: return "thm2";
        case Criterion::Srh: return "srh";
        case Criterion::Bs: return "bs";
    }
    return "?";
}

inline Verdict jm_criterion(Criterion which, const PairContext& c, double tol = kDefaultTol) {
    switch (which) {
        case Criterion::Thm1: return jm_thm1(c, tol);
        case Criterion::Thm2: return jm_thm2(c, tol);
        case Criterion::Srh: return jm_srh(c, tol);
        case Criterion::Bs: return jm_bs(c, tol);
    }
    return {};
}

}  // namespace qjm

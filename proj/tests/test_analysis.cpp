#include <catch2/catch_amalgamated.hpp>

#include "qjm/analysis.hpp"
#include "qjm/sampling.hpp"

using namespace qjm;
using Catch::Matchers::WithinAbs;

TEST_CASE("critical sharpness n_c") {
    CHECK_THAT(critical_nc(-0.1, 0.8, 0.3), WithinAbs(0.54235323949419659, 1e-14));
    // trivial observable: compatible with everything
    CHECK_THAT(critical_nc(0.0, 0.0, 0.0), WithinAbs(1.0, 1e-15));
    // sharp observable: only the trivial orthogonal partner remains
    CHECK_THAT(critical_nc(0.0, 1.0, 0.0), WithinAbs(0.0, 1e-15));
    // bias overwhelms the constraint: every admissible partner fits
    CHECK_THAT(critical_nc(0.0, 0.6, 0.5), WithinAbs(0.5, 1e-15));
    CHECK_THAT(critical_nc(0.0, 0.8, 0.79), WithinAbs(0.21, 1e-15));
}

TEST_CASE("n_c is the worst-angle boundary and caps admissibility") {
    // along the gamma = 0 direction, sharpness n_c - eps stays compatible and
    // n_c + eps does not
    const double x = -0.1, m = 0.8, y = 0.3;
    const double nc = critical_nc(x, m, y);
    auto margin_at = [&](double n) {
        const double ct = x * y / (m * n);
        const double st = std::sqrt(1.0 - ct * ct);
        return thm1_margin(pair_context(x, {m, 0, 0}, y, {n * ct, n * st, 0}));
    };
    CHECK(margin_at(nc - 1e-7) > 0.0);
    CHECK(margin_at(nc + 1e-7) < 0.0);

    PairSampler gen(97);
    for (int i = 0; i < 300; ++i) {
        // any direction with n below n_c is compatible
        const double n = gen.uniform(0.0, nc - 1e-9);
        const Vec3 dir = gen.unit_vector();
        CHECK(thm1_margin(pair_context(x, {m, 0, 0}, y, n * dir)) >= -1e-12);
    }
}

TEST_CASE("boundary scan reproduces the admissible ring") {
    const BoundaryScan scan = boundary_scan(-0.1, {0.8, 0, 0}, 0.3, 181);
    REQUIRE(scan.samples.size() == 181);
    CHECK(scan.samples.front().first == 0.0);
    CHECK_THAT(scan.samples.back().first, WithinAbs(M_PI, 1e-15));

    // parallel partner is always compatible: n_max = 1 - |y| at theta = 0
    CHECK_THAT(scan.samples.front().second, WithinAbs(0.7, 1e-12));

    const double nc = critical_nc(-0.1, 0.8, 0.3);
    double min_nmax = 1.0, max_nmax = 0.0;
    for (const auto& [theta, nmax] : scan.samples) {
        min_nmax = std::min(min_nmax, nmax);
        max_nmax = std::max(max_nmax, nmax);
        CHECK(nmax >= nc - 1e-6);
        CHECK(nmax <= 0.7 + 1e-9);
    }
    CHECK_THAT(max_nmax, WithinAbs(0.7, 1e-12));
    CHECK(min_nmax < nc + 1e-4);  // the ring touches the inner circle

    CHECK_FALSE(scan.all_admissible);
    CHECK(scan.forward_cone > 0.0);
    CHECK(scan.backward_cone > 0.0);
    // inside the cones the cap is attained, outside it is not
    auto nmax_at = [&](double theta) {
        return detail::max_sharpness_at_angle(-0.1, {0.8, 0, 0}, 0.3, std::cos(theta),
                                              Criterion::Thm1, 1e-9);
    };
    CHECK_THAT(nmax_at(scan.forward_cone - 1e-4), WithinAbs(0.7, 1e-9));
    CHECK(nmax_at(scan.forward_cone + 1e-4) < 0.7 - 1e-9);
    CHECK_THAT(nmax_at(M_PI - (scan.backward_cone - 1e-4)), WithinAbs(0.7, 1e-9));
    CHECK(nmax_at(M_PI - (scan.backward_cone + 1e-4)) < 0.7 - 1e-9);
}

TEST_CASE("boundary scan: all-admissible regime") {
    // 1 - Fx^2 = 0.36 <= |y| = 0.5
    const BoundaryScan scan = boundary_scan(0.0, {0.6, 0, 0}, 0.5, 25);
    CHECK(scan.all_admissible);
    for (const auto& [theta, nmax] : scan.samples) CHECK_THAT(nmax, WithinAbs(0.5, 1e-12));
}

TEST_CASE("boundary scan respects rotational symmetry by construction") {
    // scanning a tilted axis gives the same profile as the aligned one
    const BoundaryScan aligned = boundary_scan(-0.1, {0.8, 0, 0}, 0.3, 41);
    const Vec3 tilted = 0.8 * normalized(Vec3{1, 2, -0.5});
    const BoundaryScan rotated = boundary_scan(-0.1, tilted, 0.3, 41);
    for (std::size_t i = 0; i < aligned.samples.size(); ++i)
        CHECK_THAT(aligned.samples[i].second, WithinAbs(rotated.samples[i].second, 1e-10));
}

TEST_CASE("scan boundary points separate the four criteria identically") {
    const BoundaryScan scan = boundary_scan(-0.1, {0.8, 0, 0}, 0.3, 13, 1e-12);
    for (const auto& [theta, nmax] : scan.samples) {
        if (nmax >= 0.7 - 1e-9) continue;  // saturated angles have no crossing
        const double ct = std::cos(theta), st = std::sin(theta);
        const PairContext below = pair_context(-0.1, {0.8, 0, 0}, 0.3,
                                               Vec3{(nmax - 1e-8) * ct, (nmax - 1e-8) * st, 0});
        const PairContext above = pair_context(-0.1, {0.8, 0, 0}, 0.3,
                                               Vec3{(nmax + 1e-8) * ct, (nmax + 1e-8) * st, 0});
        CHECK(jm_thm1(below, 0.0).margin > 0.0);
        CHECK(jm_thm2(below, 0.0).margin > 0.0);
        CHECK(jm_srh(below, 0.0).margin > 0.0);
        CHECK(jm_bs(below, 0.0).margin > 0.0);
        CHECK(jm_thm1(above, 0.0).margin < 0.0);
        CHECK(jm_thm2(above, 0.0).margin < 0.0);
        CHECK(jm_srh(above, 0.0).margin < 0.0);
        CHECK(jm_bs(above, 0.0).margin < 0.0);
    }
}

TEST_CASE("per-criterion boundaries coincide") {
    for (Criterion which : {Criterion::Thm2, Criterion::Srh, Criterion::Bs}) {
        const BoundaryScan ref = boundary_scan(-0.1, {0.8, 0, 0}, 0.3, 25, 1e-12);
        const BoundaryScan other = boundary_scan(-0.1, {0.8, 0, 0}, 0.3, 25, 1e-12, which);
        for (std::size_t i = 0; i < ref.samples.size(); ++i)
            CHECK_THAT(other.samples[i].second, WithinAbs(ref.samples[i].second, 1e-6));
    }
}

TEST_CASE("trade-off curve shape") {
    const TradeoffCurve curve = tradeoff_curve(-0.1, 0.2, 0.3, 181);
    REQUIRE(curve.samples.size() == 181);
    CHECK(curve.samples.front().first == 0.0);
    CHECK_THAT(curve.samples.back().first, WithinAbs(0.9, 1e-15));
    CHECK_THAT(curve.samples.front().second, WithinAbs(0.8, 1e-12));
    CHECK(curve.m0 > 0.0);
    CHECK(curve.m0 < 0.9);

    for (std::size_t i = 1; i < curve.samples.size(); ++i) {
        const auto& [m_prev, n_prev] = curve.samples[i - 1];
        const auto& [m_cur, n_cur] = curve.samples[i];
        if (m_prev >= curve.m0) CHECK(n_cur <= n_prev + 1e-9);  // non-increasing branch
        if (m_cur <= curve.m0) CHECK_THAT(n_cur, WithinAbs(0.8, 1e-9));  // plateau
    }

    // the no-trade-off inequality correctly predicts a trade-off here:
    // (1 - 0.3) * 0.9 * 0.8 = 0.504 > 2|xy| = 0.04
    const NoTradeoffFlags flags = no_tradeoff_conditions(-0.1, 0.2, 0.5, 0.5, 0.3);
    CHECK_FALSE(flags.sharpness);
}

TEST_CASE("unbiased orthogonal trade-off has the closed form sqrt(1 - m^2)") {
    const TradeoffCurve curve = tradeoff_curve(0.0, 0.0, 0.0, 51);
    for (const auto& [m, nmax] : curve.samples)
        CHECK_THAT(nmax, WithinAbs(std::sqrt(1.0 - m * m), 1e-9));
}

TEST_CASE("critical sharpness swaps symmetrically") {
    // n0 = m0 of the swapped parameters
    const TradeoffCurve ab = tradeoff_curve(-0.1, 0.2, 0.3, 11);
    const TradeoffCurve ba = tradeoff_curve(0.2, -0.1, 0.3, 11);
    CHECK(ab.m0 > 0.0);
    CHECK(ba.m0 > 0.0);
    // both curves cross their own plateau exactly at the other's boundary pair
    const double n_at_m0 =
        detail::max_sharpness_at_angle(-0.1, {ab.m0, 0, 0}, 0.2, 0.3, Criterion::Thm1, 1e-12);
    CHECK_THAT(n_at_m0, WithinAbs(0.8, 1e-6));
}

TEST_CASE("no-trade-off flags") {
    CHECK_FALSE(no_tradeoff_conditions(-0.1, 0.2, 0.4, 0.4, 0.3).sharpness);
    // unbiased: only the antipodal direction removes the trade-off
    CHECK_FALSE(no_tradeoff_conditions(0.0, 0.0, 0.5, 0.5, 0.0).sharpness);
    CHECK(no_tradeoff_conditions(0.0, 0.0, 0.5, 0.5, -1.0).sharpness);
    // m + n + |m ± n| <= 2 for small orthogonal vectors
    const auto f = no_tradeoff_conditions(make_observable(0.0, {0.4, 0, 0}),
                                          make_observable(0.0, {0, 0.4, 0}));
    CHECK(f.bias);
    CHECK_FALSE(no_tradeoff_conditions(make_observable(0.0, {0.9, 0, 0}),
                                       make_observable(0.0, {0, 0.9, 0}))
                    .bias);
}

TEST_CASE("unsharpness trade-off residuals") {
    const PairContext boundary = pair_context(0.0, {0.6, 0, 0}, 0.0, {0, 0.8, 0});
    CHECK_THAT(mur_check(boundary, 1, 0, 1, 0), WithinAbs(0.0, 1e-12));

    const PairContext inner = pair_context(0.0, {0.6, 0, 0}, 0.0, {0, 0.6, 0});
    CHECK_THAT(mur_check(inner, 1, 0, 1, 0), WithinAbs(0.28, 1e-12));

    const PairContext skew = pair_context(0.1, {0.5, 0, 0}, 0.1, {0, 0.5, 0});
    CHECK_THROWS_AS(mur_check(skew, 1, 0, 1, 0), not_orthogonal);
    CHECK_THROWS_AS(mur_check(boundary, 0.5, 0.7, 1, 0), std::invalid_argument);

    // Q1 = 1, P2 = 0 reduces to the duality form Q2^2 (1 - D1^2 - n^2)
    PairSampler gen(111);
    for (int i = 0; i < 200; ++i) {
        const double m = gen.uniform(), n = gen.uniform();
        const PairContext c = pair_context(0.0, {m, 0, 0}, 0.0, {0, n, 0});
        const double q2 = gen.uniform(), p1 = gen.uniform();
        const double expect = q2 * q2 * (1.0 - m * m - n * n * (1.0 - p1 * p1));
        CHECK_THAT(mur_check(c, 1.0, p1, q2, 0.0), WithinAbs(expect, 1e-13));
    }
}

TEST_CASE("unsharpness trade-off holds for compatible orthogonal pairs") {
    PairSampler gen(131);
    int checked = 0;
    while (checked < 1000) {
        const double x = gen.uniform(-0.9, 0.9);
        const double m = gen.uniform(0.05, 1.0 - std::abs(x));
        const double y = gen.uniform(-0.9, 0.9);
        const double n = gen.uniform(0.05, 1.0 - std::abs(y));
        if (m * n <= std::abs(x * y)) continue;
        const double ct = x * y / (m * n);
        const PairContext c =
            pair_context(x, {m, 0, 0}, y, {n * ct, n * std::sqrt(1 - ct * ct), 0});
        if (thm1_margin(c) < 0.0) continue;
        ++checked;
        const double q1 = gen.uniform(), q2 = gen.uniform();
        const double p1 = gen.uniform(0.0, q1), p2 = gen.uniform(0.0, q2);
        CHECK(mur_check(c, q1, p1, q2, p2) >= -1e-10);
    }
}

TEST_CASE("scan and curve argument validation") {
    CHECK_THROWS_AS(boundary_scan(0.0, {0.5, 0, 0}, 1.5, 10), std::invalid_argument);
    CHECK_THROWS_AS(boundary_scan(0.9, {0.5, 0, 0}, 0.0, 10), invalid_observable);
    CHECK_THROWS_AS(boundary_scan(0.0, {0.5, 0, 0}, 0.0, 0), std::invalid_argument);
    CHECK_THROWS_AS(tradeoff_curve(0.0, 0.0, 1.5, 10), std::invalid_argument);
    CHECK_THROWS_AS(tradeoff_curve(0.0, 0.0, 0.5, 1), std::invalid_argument);
}

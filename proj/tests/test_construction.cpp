#include <catch2/catch_amalgamated.hpp>

#include "qjm/construction.hpp"
#include "qjm/geometry.hpp"
#include "qjm/sampling.hpp"

using namespace qjm;
using Catch::Matchers::WithinAbs;

namespace {
const SimpleObservable kA07 = make_observable(0.0, {0.7, 0, 0});
const SimpleObservable kB07 = make_observable(0.0, {0, 0.7, 0});
}  // namespace

TEST_CASE("assemble: reference effects and marginal identity") {
    const PairContext c = pair_context(kA07, kB07);
    const JointObservable j = assemble(c.gamma, c.g, kA07, kB07);
    for (Sign mu : kSigns)
        for (Sign nu : kSigns) {
            const Effect& e = j.effect(mu, nu);
            CHECK_THAT(e.c0, WithinAbs(0.25, 1e-15));
            CHECK_THAT(e.c.x, WithinAbs(0.175 * to_real(mu), 1e-15));
            CHECK_THAT(e.c.y, WithinAbs(0.175 * to_real(nu), 1e-15));
            CHECK(e.positivity_margin() > 0.0);
        }

    PairSampler gen(29);
    for (int i = 0; i < 500; ++i) {
        const auto [a, b] = gen.pair();
        // marginals hold for arbitrary (Z, z), positive or not
        const JointObservable any =
            assemble(gen.uniform(-3, 3), 3.0 * gen.unit_vector(), a, b);
        const VerificationReport rep = verify_joint(any, a, b);
        CHECK(rep.max_marginal_residual <= 1e-15);
        CHECK(rep.completeness_residual <= 1e-15);
    }

    // Z too negative drives the mu = nu cells' weight below zero
    const JointObservable bad = assemble(-1.0, Vec3{}, kA07, kB07);
    CHECK(bad.effect(Sign::Plus, Sign::Plus).c0 == 0.0);
    CHECK(verify_joint(bad, kA07, kB07).min_positivity_margin < 0.0);
}

TEST_CASE("z_cap reference values") {
    const PairContext c = pair_context(0.0, {0.5, 0, 0}, 0.0, {0, 0.5, 0});
    CHECK_THAT(z_cap(Vec3{}, c), WithinAbs(-0.29289321881345248, 1e-15));
    CHECK_THAT(z_cap(c.mv + c.nv, c), WithinAbs(0.41421356237309505, 1e-15));
    const PairContext zero = pair_context(0.0, Vec3{}, 0.0, Vec3{});
    CHECK_THAT(z_cap(Vec3{}, zero), WithinAbs(-1.0, 1e-15));
}

TEST_CASE("construct_joint picks the documented cases") {
    SECTION("orthogonal unbiased 0.7 pair: main assembly") {
        const JointObservable j = construct_joint(kA07, kB07);
        CHECK(j.provenance == ConstructionCase::ThmThreeA);
        CHECK_THAT(j.effect(Sign::Plus, Sign::Plus).c0, WithinAbs(0.25, 1e-15));
        CHECK(verify_joint(j, kA07, kB07).pass);
    }
    SECTION("parallel unbiased pair: commuting product") {
        const SimpleObservable a = make_observable(0.0, {0.6, 0, 0});
        const SimpleObservable b = make_observable(0.0, {0.8, 0, 0});
        const JointObservable j = construct_joint(a, b);
        CHECK(j.provenance == ConstructionCase::ProductS0);
        for (Sign mu : kSigns)
            for (Sign nu : kSigns) {
                const double uv = to_real(mu) * to_real(nu);
                CHECK_THAT(j.effect(mu, nu).c0, WithinAbs((1 + uv * 0.48) / 4, 1e-15));
                CHECK((j.effect(mu, nu).c -
                       0.25 * (to_real(mu) * a.m + to_real(nu) * b.m))
                          .norm() < 1e-15);
            }
        CHECK(verify_joint(j, a, b).pass);
    }
    SECTION("sharp orthogonal pair is rejected") {
        CHECK_THROWS_AS(construct_joint(make_observable(0, {1, 0, 0}),
                                        make_observable(0, {0, 1, 0})),
                        incompatible_pair);
    }
    SECTION("dominated pair: degenerate layout with a zero cell") {
        const SimpleObservable a = make_observable(0.4, {0.5, 0, 0});
        const SimpleObservable b = make_observable(0.0, {0.49, 0.05, 0});
        const PairContext c = pair_context(a, b);
        REQUIRE(c.Delta(Sign::Plus) < 0.0);
        REQUIRE(c.s > 0.0);
        const JointObservable j = construct_joint(a, b);
        CHECK(j.provenance == ConstructionCase::DegenerateDelta);
        CHECK(verify_joint(j, a, b).pass);
        // eta = sgn(x - y) = +, tau = +: the (-, +) cell must vanish
        const Effect& zero = j.effect(Sign::Minus, Sign::Plus);
        CHECK(zero.c0 == 0.0);
        CHECK(zero.c.norm() == 0.0);
        // one cell reproduces the partner effect unchanged
        const Effect want = effect_of(b, Sign::Plus);
        CHECK_THAT(j.effect(Sign::Plus, Sign::Plus).c0, WithinAbs(want.c0, 1e-15));
    }
    SECTION("spread pair: witness-point assembly") {
        const SimpleObservable a = make_observable(-0.1, {0.8, 0, 0});
        const SimpleObservable b = make_observable(0.3, {0.35 * 0.8, 0.35 * 0.6, 0});
        const PairContext c = pair_context(a, b);
        REQUIRE(thm1_margin(c) > 0.0);
        REQUIRE(c.R < 0.0);
        REQUIRE(c.max_alpha_beta() >= 1.0);
        REQUIRE(c.Delta(Sign::Plus) > 0.0);
        REQUIRE(c.Delta(Sign::Minus) > 0.0);
        const JointObservable j = construct_joint(a, b);
        CHECK(j.provenance == ConstructionCase::ThmThreeB);
        CHECK(verify_joint(j, a, b).pass);

        // the witness is the midpoint of the two selected boundary
        // intersection points and lies in the feasible region
        REQUIRE(std::abs(c.alpha) >= 1.0);
        const Sign tau = sign_of(c.alpha);
        const Sign eta = sign_of(c.B(tau) * c.beta + to_real(tau) * c.gamma - c.x);
        const auto pts = ellipse_intersections(eta, tau, c);
        REQUIRE(pts.size() == 2);
        CHECK((j.z - 0.5 * (pts[0] + pts[1])).norm() < 1e-12);
        CHECK(feasibility_margin(c, j.z) >= -1e-12);
    }
}

TEST_CASE("every compatible random pair constructs and verifies") {
    PairSampler gen(101);
    int built = 0;
    std::array<int, 5> case_count{};
    while (built < 2000) {
        const auto [a, b] = gen.pair();
        if (thm1_margin(pair_context(a, b)) < 0.0) continue;
        const JointObservable j = construct_joint(a, b);
        ++case_count[static_cast<int>(j.provenance)];
        const VerificationReport rep = verify_joint(j, a, b);
        CHECK(rep.pass);
        CHECK(rep.max_marginal_residual <= 1e-13);
        ++built;
    }
    INFO("cases " << case_count[0] << "/" << case_count[1] << "/" << case_count[2] << "/"
                  << case_count[3]);
    // the degenerate- and both theorem-cases must all be exercised
    CHECK(case_count[static_cast<int>(ConstructionCase::DegenerateDelta)] > 0);
    CHECK(case_count[static_cast<int>(ConstructionCase::ThmThreeA)] > 0);
    CHECK(case_count[static_cast<int>(ConstructionCase::ThmThreeB)] > 0);
}

TEST_CASE("main-assembly positivity is equivalent to R >= 0") {
    PairSampler gen(55);
    for (int i = 0; i < 1000; ++i) {
        const auto [a, b] = gen.pair();
        const PairContext c = pair_context(a, b);
        if (c.s2 == 0.0 || std::abs(c.R) <= 1e-12) continue;
        double min_gap = std::numeric_limits<double>::infinity();
        for (Sign mu : kSigns)
            for (Sign nu : kSigns)
                min_gap = std::min(min_gap, c.d(mu, nu) - (c.g - c.q(nu, mu)).norm());
        CHECK((min_gap >= 0.0) == (c.R >= 0.0));
        // and cellwise, d^2 - |g - q|^2 reproduces R itself
        for (Sign mu : kSigns)
            for (Sign nu : kSigns) {
                const double gap = c.d(mu, nu) * c.d(mu, nu) - (c.g - c.q(nu, mu)).norm2();
                CHECK_THAT(gap, WithinAbs(c.R, 1e-9 * (1.0 + std::abs(c.R))));
            }
    }
}

TEST_CASE("pairs on the R = 0 surface give projector-proportional cells") {
    PairSampler gen(203);
    int found = 0;
    while (found < 60) {
        const auto [a, b] = gen.pair();
        auto r_at = [&](double t) { return pair_context(a, SimpleObservable{b.x, t * b.m}).R; };
        const PairContext full = pair_context(a, b);
        if (full.s2 == 0.0 || !(r_at(1.0) < 0.0)) continue;
        if (!(r_at(0.05) > 0.0)) continue;
        double lo = 0.05, hi = 1.0;
        for (int k = 0; k < 80; ++k) {
            const double mid = 0.5 * (lo + hi);
            (r_at(mid) > 0.0 ? lo : hi) = mid;
        }
        const SimpleObservable bt{b.x, 0.5 * (lo + hi) * b.m};
        const PairContext c = pair_context(a, bt);
        if (std::abs(c.R) > 1e-13 || thm1_margin(c) < 0.0 ||
            c.Delta(Sign::Plus) < 0.0 || c.Delta(Sign::Minus) < 0.0)
            continue;
        ++found;
        const JointObservable j = assemble(c.gamma, c.g, a, bt);
        for (Sign mu : kSigns)
            for (Sign nu : kSigns)
                CHECK_THAT(j.effect(mu, nu).positivity_margin(), WithinAbs(0.0, 1e-10));
    }
}

TEST_CASE("near-boundary compatible pairs still construct") {
    PairSampler gen(303);
    int found = 0;
    while (found < 100) {
        const auto p = gen.boundary_pair();
        if (!p) continue;
        ++found;
        const PairContext c = pair_context(p->first, p->second);
        REQUIRE(std::abs(thm1_margin(c)) < 1e-10);
        const JointObservable j = construct_joint(p->first, p->second, 1e-8);
        CHECK(verify_joint(j, p->first, p->second, 1e-8).pass);
    }
}

#pragma once

#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>

// Core types for two-outcome qubit observables in Bloch form and the
// derived scalar/vector context shared by every compatibility criterion.

namespace qjm {

inline constexpr double kValidationEps = 1e-12;  // observable positivity slack
inline constexpr double kDefaultTol = 1e-9;      // default criterion tolerance

struct invalid_observable : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// ---------------------------------------------------------------------------
// Sign index, closed under product and negation.
// ---------------------------------------------------------------------------

enum class Sign : int { Plus = +1, Minus = -1 };

inline constexpr std::array<Sign, 2> kSigns{Sign::Plus, Sign::Minus};

constexpr int to_int(Sign s) { return static_cast<int>(s); }
constexpr double to_real(Sign s) { return static_cast<double>(to_int(s)); }
constexpr std::size_t idx(Sign s) { return s == Sign::Plus ? 0 : 1; }

constexpr Sign operator-(Sign s) { return s == Sign::Plus ? Sign::Minus : Sign::Plus; }
constexpr Sign operator*(Sign a, Sign b) { return a == b ? Sign::Plus : Sign::Minus; }

// sgn[f] = +1 for f >= 0 and -1 for f < 0.
constexpr Sign sign_of(double f) { return f >= 0.0 ? Sign::Plus : Sign::Minus; }

inline const char* to_string(Sign s) { return s == Sign::Plus ? "+" : "-"; }

// ---------------------------------------------------------------------------
// Three-component real vector (Bloch coordinates).
// ---------------------------------------------------------------------------

struct Vec3 {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    constexpr Vec3() = default;
    constexpr Vec3(double px, double py, double pz) : x(px), y(py), z(pz) {}

    constexpr Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
    constexpr Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
    constexpr Vec3 operator-() const { return {-x, -y, -z}; }
    constexpr Vec3 operator*(double t) const { return {t * x, t * y, t * z}; }
    constexpr Vec3 operator/(double t) const { return {x / t, y / t, z / t}; }
    constexpr Vec3& operator+=(const Vec3& o) {
        x += o.x;
        y += o.y;
        z += o.z;
        return *this;
    }

    constexpr double dot(const Vec3& o) const { return x * o.x + y * o.y + z * o.z; }
    constexpr Vec3 cross(const Vec3& o) const {
        return {y * o.z - z * o.y, z * o.x - x * o.z, x * o.y - y * o.x};
    }
    constexpr double norm2() const { return dot(*this); }
    double norm() const { return std::sqrt(norm2()); }

    bool finite() const { return std::isfinite(x) && std::isfinite(y) && std::isfinite(z); }
};

constexpr Vec3 operator*(double t, const Vec3& v) { return v * t; }

inline Vec3 normalized(const Vec3& v) {
    const double n = v.norm();
    return n > 0.0 ? v / n : Vec3{};
}

// ---------------------------------------------------------------------------
// Simple observable: the two-outcome POVM with effects (1 +- (x + m.sigma))/2.
// |x| is the biasedness, |m| the sharpness; positivity demands |x| + |m| <= 1.
// ---------------------------------------------------------------------------

struct SimpleObservable {
    double x = 0.0;  // bias
    Vec3 m;          // Bloch vector

    double sharpness() const { return m.norm(); }
};

inline SimpleObservable make_observable(double x, const Vec3& m) {
    if (!std::isfinite(x) || !m.finite())
        throw invalid_observable("observable parameters must be finite");
    const double sharp = m.norm();
    if (std::abs(x) + sharp > 1.0 + kValidationEps)
        throw invalid_observable("positivity violated: |x| + |m| = " +
                                 std::to_string(std::abs(x) + sharp) + " > 1");
    return SimpleObservable{x, m};
}

// ---------------------------------------------------------------------------
// Effect: the 2x2 Hermitian operator c0*I + c.sigma. Positive iff c0 >= |c|.
// ---------------------------------------------------------------------------

struct Effect {
    double c0 = 0.0;
    Vec3 c;

    double trace() const { return 2.0 * c0; }
    // Smallest eigenvalue; >= 0 exactly when the operator is positive.
    double positivity_margin() const { return c0 - c.norm(); }
};

inline bool effect_is_positive(const Effect& e, double tol) {
    return e.c0 >= e.c.norm() - tol;
}

// The two effects (1 +- x)/2 * I +- m/2 . sigma; they sum to the identity.
inline std::pair<Effect, Effect> effects_of(const SimpleObservable& obs) {
    return {Effect{0.5 * (1.0 + obs.x), 0.5 * obs.m},
            Effect{0.5 * (1.0 - obs.x), -0.5 * obs.m}};
}

inline Effect effect_of(const SimpleObservable& obs, Sign mu) {
    const double u = to_real(mu);
    return Effect{0.5 * (1.0 + u * obs.x), (0.5 * u) * obs.m};
}

// ---------------------------------------------------------------------------
// PairContext: every scalar and vector derived from a pair of observables
// that the criteria, constructions and geometry consume. Computed eagerly
// once per pair; all members immutable afterwards.
//
// Naming follows the derived quantities themselves: F, gamma, alpha, beta,
// g, R, Delta_tau, A_mu, B_nu, a_mu, b_nu, q/d/D/L/K on the sign grid,
// f-, f+, Pi, l, h+-.
// ---------------------------------------------------------------------------

struct PairContext {
    SimpleObservable obs_a, obs_b;

    double x = 0, y = 0;  // biases
    Vec3 mv, nv;          // Bloch vectors
    double m = 0, n = 0;  // sharpnesses

    Vec3 sv;              // m x n
    double s = 0, s2 = 0; // |m x n| and its square
    double cdot = 0;      // m . n
    double gamma = 0;     // m . n - x y

    // F and companions. one_minus_F2 is evaluated in a cancellation-free
    // form (2 m^2 / (1 - x^2 + m^2 + sqrt(a+ a-))) so that the identity
    // x^2/F^2 + m^2/(1-F^2) = 1 holds to machine precision.
    double Fx = 0, Fy = 0;
    double Fx2 = 0, Fy2 = 0;
    double one_minus_Fx2 = 0, one_minus_Fy2 = 0;
    double ratio_x = 0, ratio_y = 0;  // x^2/Fx^2 with the F=0 limit := 0

    double f_minus = 0, f_plus = 0;  // f- = (1-Fx^2-Fy^2)(1-x^2/Fx^2-y^2/Fy^2)

    // alpha, beta solve g.m = y + gamma x, g.n = x + gamma y inside the
    // span of m and n; alpha_num/beta_num are the s^2-scaled polynomial
    // numerators, well defined even when s = 0 (alpha, beta are NaN there).
    double alpha_num = 0, beta_num = 0;
    double alpha = 0, beta = 0;
    Vec3 g;
    double R = 0;  // 1 + x^2 + y^2 + gamma^2 - m^2 - n^2 - |g|^2

    double Pi = 0;  // max(+-alpha_num, +-beta_num) - s^2  ==  s^2(max{|a|,|b|}-1)

    double l = 0;                     // sqrt(y^2 + m^2 - |y|(1 - x^2 + m^2)), clamped
    bool l_clamped = false;           // true when the radicand was negative
    double h_plus = 0, h_minus = 0;   // m^2 - (gamma +- y)^2

    std::array<double, 2> A_arr{}, B_arr{};      // 1 - mu x, 1 - nu y
    std::array<double, 2> a_arr{}, b_arr{};      // A^2 - m^2, B^2 - n^2
    std::array<double, 2> Delta_arr{};           // (m - tau n)^2 - (x - tau y)^2
    std::array<std::array<Vec3, 2>, 2> q_arr{};  // mu m + nu n
    std::array<std::array<double, 2>, 2> d_arr{};
    std::array<std::array<double, 2>, 2> D_arr{};
    std::array<std::array<Vec3, 2>, 2> L_arr{};
    std::array<std::array<Vec3, 2>, 2> K_arr{};

    double A(Sign mu) const { return A_arr[idx(mu)]; }
    double B(Sign nu) const { return B_arr[idx(nu)]; }
    double a(Sign mu) const { return a_arr[idx(mu)]; }
    double b(Sign nu) const { return b_arr[idx(nu)]; }
    double Delta(Sign tau) const { return Delta_arr[idx(tau)]; }
    const Vec3& q(Sign mu, Sign nu) const { return q_arr[idx(mu)][idx(nu)]; }
    double d(Sign mu, Sign nu) const { return d_arr[idx(mu)][idx(nu)]; }
    double D(Sign mu, Sign nu) const { return D_arr[idx(mu)][idx(nu)]; }
    const Vec3& L(Sign mu, Sign nu) const { return L_arr[idx(mu)][idx(nu)]; }
    const Vec3& K(Sign mu, Sign nu) const { return K_arr[idx(mu)][idx(nu)]; }

    double max_alpha_beta() const { return std::max(std::abs(alpha), std::abs(beta)); }
};

namespace detail {

struct FPieces {
    double F, F2, one_minus_F2, ratio;
};

// F = (sqrt((1+x)^2 - m^2) + sqrt((1-x)^2 - m^2))/2 plus the stable
// companions. Radicands may dip below zero by the validation slack; they
// are clamped. F = 0 only at (x = 0, m = 1), where x^2/F^2 -> 0.
inline FPieces f_pieces(double x, double m) {
    const double rp = std::max((1.0 + x) * (1.0 + x) - m * m, 0.0);
    const double rm = std::max((1.0 - x) * (1.0 - x) - m * m, 0.0);
    const double sq = std::sqrt(rp * rm);
    FPieces p{};
    p.F = 0.5 * (std::sqrt(rp) + std::sqrt(rm));
    p.F2 = 0.5 * (1.0 + x * x - m * m + sq);
    p.one_minus_F2 = m > 0.0 ? 2.0 * m * m / (1.0 - x * x + m * m + sq) : 0.0;
    p.ratio = p.F2 > 0.0 ? x * x / p.F2 : 0.0;
    return p;
}

}  // namespace detail

inline PairContext pair_context(const SimpleObservable& a, const SimpleObservable& b) {
    PairContext c;
    c.obs_a = a;
    c.obs_b = b;
    c.x = a.x;
    c.y = b.x;
    c.mv = a.m;
    c.nv = b.m;
    c.m = a.m.norm();
    c.n = b.m.norm();
    c.sv = c.mv.cross(c.nv);
    c.s2 = c.sv.norm2();
    c.s = std::sqrt(c.s2);
    c.cdot = c.mv.dot(c.nv);
    c.gamma = c.cdot - c.x * c.y;

    const auto px = detail::f_pieces(c.x, c.m);
    const auto py = detail::f_pieces(c.y, c.n);
    c.Fx = px.F;
    c.Fy = py.F;
    c.Fx2 = px.F2;
    c.Fy2 = py.F2;
    c.one_minus_Fx2 = px.one_minus_F2;
    c.one_minus_Fy2 = py.one_minus_F2;
    c.ratio_x = px.ratio;
    c.ratio_y = py.ratio;

    for (Sign mu : kSigns) {
        c.A_arr[idx(mu)] = 1.0 - to_real(mu) * c.x;
        c.B_arr[idx(mu)] = 1.0 - to_real(mu) * c.y;
        c.a_arr[idx(mu)] = c.A_arr[idx(mu)] * c.A_arr[idx(mu)] - c.m * c.m;
        c.b_arr[idx(mu)] = c.B_arr[idx(mu)] * c.B_arr[idx(mu)] - c.n * c.n;
        const double t = to_real(mu);
        c.Delta_arr[idx(mu)] = (c.mv - t * c.nv).norm2() - (c.x - t * c.y) * (c.x - t * c.y);
    }

    c.f_minus = (1.0 - c.Fx2 - c.Fy2) * (1.0 - c.ratio_x - c.ratio_y);
    const double abprod = std::max(c.a(Sign::Plus) * c.a(Sign::Minus) *
                                       c.b(Sign::Plus) * c.b(Sign::Minus),
                                   0.0);
    c.f_plus = c.f_minus + std::sqrt(abprod);

    c.alpha_num = (c.y + c.gamma * c.x) * c.n * c.n - (c.x + c.gamma * c.y) * c.cdot;
    c.beta_num = (c.x + c.gamma * c.y) * c.m * c.m - (c.y + c.gamma * c.x) * c.cdot;
    if (c.s2 > 0.0) {
        c.alpha = c.alpha_num / c.s2;
        c.beta = c.beta_num / c.s2;
        c.g = c.alpha * c.mv + c.beta * c.nv;
        c.R = 1.0 + c.x * c.x + c.y * c.y + c.gamma * c.gamma - c.m * c.m - c.n * c.n -
              c.g.norm2();
    } else {
        // Parallel Bloch vectors: alpha, beta and everything built from them
        // are undefined. Representing by NaN; the criteria route around it.
        c.alpha = c.beta = std::numeric_limits<double>::quiet_NaN();
        c.g = Vec3{c.alpha, c.alpha, c.alpha};
        c.R = c.alpha;
    }

    c.Pi = std::max(std::abs(c.alpha_num), std::abs(c.beta_num)) - c.s2;

    const double l_rad = c.y * c.y + c.m * c.m - std::abs(c.y) * (1.0 - c.x * c.x + c.m * c.m);
    c.l_clamped = l_rad < 0.0;
    c.l = std::sqrt(std::max(l_rad, 0.0));
    c.h_plus = c.m * c.m - (c.gamma + c.y) * (c.gamma + c.y);
    c.h_minus = c.m * c.m - (c.gamma - c.y) * (c.gamma - c.y);

    for (Sign mu : kSigns) {
        for (Sign nu : kSigns) {
            const double u = to_real(mu), v = to_real(nu);
            c.q_arr[idx(mu)][idx(nu)] = u * c.mv + v * c.nv;
            c.d_arr[idx(mu)][idx(nu)] = 1.0 - u * c.x - v * c.y + u * v * c.gamma;
            c.D_arr[idx(mu)][idx(nu)] =
                v * c.A(mu) * c.alpha + u * c.B(nu) * c.beta + u * v * c.gamma - 1.0;
            c.L_arr[idx(mu)][idx(nu)] = v * c.A(mu) * c.nv - u * c.B(nu) * c.mv;
            c.K_arr[idx(mu)][idx(nu)] = v * c.a(mu) * c.nv - u * c.b(nu) * c.mv;
        }
    }
    return c;
}

inline PairContext pair_context(double x, const Vec3& m, double y, const Vec3& n) {
    return pair_context(make_observable(x, m), make_observable(y, n));
}

}  // namespace qjm

// Command-line surface: pair compatibility checking, joint-observable
// construction, boundary/trade-off data generation, fuzz equivalence and
// identity harnesses, and measurement simulation.
//
// Exit codes: 0 ok, 1 invalid input, 2 incompatible pair, 3 property or
// equivalence violation. All numeric output is printed with 17 significant
// digits so regression diffs are bit-stable.

#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "qjm/identities.hpp"
#include "qjm/qjm.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInput = 1;
constexpr int kExitIncompatible = 2;
constexpr int kExitViolation = 3;

std::string num(double v) {
    if (!std::isfinite(v)) return "null";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string vec(const qjm::Vec3& v) {
    return "[" + num(v.x) + "," + num(v.y) + "," + num(v.z) + "]";
}

std::string quoted(const std::string& s) { return "\"" + s + "\""; }

struct PairInput {
    qjm::SimpleObservable a, b;
};

PairInput load_pair(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open pair file: " + path);
    nlohmann::json doc = nlohmann::json::parse(in);
    auto read = [](const nlohmann::json& node) {
        const auto m = node.at("m");
        if (!m.is_array() || m.size() != 3)
            throw std::runtime_error("observable field \"m\" must be a 3-array");
        return qjm::make_observable(
            node.at("x").get<double>(),
            {m[0].get<double>(), m[1].get<double>(), m[2].get<double>()});
    };
    return {read(doc.at("A")), read(doc.at("B"))};
}

qjm::Vec3 parse_triple(const std::string& text, const char* what) {
    qjm::Vec3 v;
    char extra;
    if (std::sscanf(text.c_str(), "%lf,%lf,%lf%c", &v.x, &v.y, &v.z, &extra) != 3)
        throw std::runtime_error(std::string(what) + " must be \"x,y,z\"");
    return v;
}

// --m accepts either a sharpness (vector taken along the first axis) or a
// full comma-separated Bloch vector.
qjm::Vec3 parse_m(const std::string& text) {
    if (text.find(',') == std::string::npos) return {std::stod(text), 0.0, 0.0};
    return parse_triple(text, "--m");
}

qjm::Criterion parse_criterion(const std::string& name) {
    if (name == "thm1") return qjm::Criterion::Thm1;
    if (name == "thm2") return qjm::Criterion::Thm2;
    if (name == "srh") return qjm::Criterion::Srh;
    if (name == "bs") return qjm::Criterion::Bs;
    throw std::runtime_error("unknown criterion: " + name + " (thm1|thm2|srh|bs)");
}

std::string verdict_json(const qjm::Verdict& v) {
    std::string out = "{\"decision\":" + quoted(to_string(v.decision)) +
                      ",\"margin\":" + num(v.margin);
    if (!v.diag.empty()) out += ",\"note\":" + quoted(v.diag);
    return out + "}";
}

std::string pair_json(const PairInput& p) {
    return "{\"A\":{\"x\":" + num(p.a.x) + ",\"m\":" + vec(p.a.m) +
           "},\"B\":{\"x\":" + num(p.b.x) + ",\"m\":" + vec(p.b.m) + "}}";
}

// ---------------------------------------------------------------------------

int cmd_check(const std::string& path, double tol) {
    const PairInput p = load_pair(path);
    const qjm::PairContext ctx = qjm::pair_context(p.a, p.b);
    const std::array<std::pair<const char*, qjm::Verdict>, 4> verdicts{
        {{"thm1", qjm::jm_thm1(ctx, tol)},
         {"thm2", qjm::jm_thm2(ctx, tol)},
         {"srh", qjm::jm_srh(ctx, tol)},
         {"bs", qjm::jm_bs(ctx, tol)}}};

    bool agree = true;
    for (const auto& [ni, vi] : verdicts)
        for (const auto& [nj, vj] : verdicts)
            if (vi.decision != qjm::Decision::Boundary &&
                vj.decision != qjm::Decision::Boundary && vi.decision != vj.decision)
                agree = false;

    std::string out = "{\"input\":" + pair_json(p);
    out += ",\"derived\":{\"Fx\":" + num(ctx.Fx) + ",\"Fy\":" + num(ctx.Fy) +
           ",\"gamma\":" + num(ctx.gamma) + ",\"R\":" + num(ctx.R) +
           ",\"alpha\":" + num(ctx.alpha) + ",\"beta\":" + num(ctx.beta) +
           ",\"s\":" + num(ctx.s) + "}";
    out += ",\"verdicts\":{";
    for (std::size_t i = 0; i < verdicts.size(); ++i) {
        if (i) out += ",";
        out += quoted(verdicts[i].first) + ":" + verdict_json(verdicts[i].second);
    }
    out += "},\"agree\":" + std::string(agree ? "true" : "false") + "}";
    std::cout << out << "\n";
    return agree ? kExitOk : kExitViolation;
}

int cmd_construct(const std::string& path, double tol) {
    const PairInput p = load_pair(path);
    qjm::JointObservable j;
    try {
        j = qjm::construct_joint(p.a, p.b, tol);
    } catch (const qjm::incompatible_pair& e) {
        std::cerr << e.what() << "\n";
        return kExitIncompatible;
    }
    const qjm::VerificationReport rep = qjm::verify_joint(j, p.a, p.b, tol);

    std::string out = "{\"input\":" + pair_json(p);
    out += ",\"case\":" + quoted(to_string(j.provenance));
    if (j.has_assembly) out += ",\"Z\":" + num(j.Z) + ",\"z\":" + vec(j.z);
    out += ",\"effects\":{";
    bool first = true;
    for (qjm::Sign mu : qjm::kSigns) {
        for (qjm::Sign nu : qjm::kSigns) {
            if (!first) out += ",";
            first = false;
            const qjm::Effect& e = j.effect(mu, nu);
            out += quoted(std::string(to_string(mu)) + to_string(nu)) +
                   ":{\"c0\":" + num(e.c0) + ",\"c\":" + vec(e.c) + "}";
        }
    }
    out += "},\"verification\":{\"max_marginal_residual\":" + num(rep.max_marginal_residual) +
           ",\"min_positivity_margin\":" + num(rep.min_positivity_margin) +
           ",\"completeness_residual\":" + num(rep.completeness_residual) +
           ",\"pass\":" + (rep.pass ? "true" : "false") + "}}";
    std::cout << out << "\n";
    return kExitOk;
}

int cmd_boundary(double x, const std::string& m_text, double y, int angles, double tol,
                 const std::string& criterion) {
    const qjm::Vec3 m = parse_m(m_text);
    const qjm::BoundaryScan scan =
        qjm::boundary_scan(x, m, y, angles, tol, parse_criterion(criterion));
    std::cout << "theta,n_max\n";
    for (const auto& [theta, nmax] : scan.samples)
        std::cout << num(theta) << "," << num(nmax) << "\n";
    std::cerr << "forward_cone=" << num(scan.forward_cone)
              << " backward_cone=" << num(scan.backward_cone)
              << " all_admissible=" << (scan.all_admissible ? "true" : "false") << "\n";
    return kExitOk;
}

int cmd_tradeoff(double x, double y, double costheta, int points, double tol) {
    const qjm::TradeoffCurve curve = qjm::tradeoff_curve(x, y, costheta, points, tol);
    std::cout << "m,n_max\n";
    for (const auto& [m, nmax] : curve.samples) std::cout << num(m) << "," << num(nmax) << "\n";
    std::cout << "m0=" << num(curve.m0) << "\n";
    return kExitOk;
}

// ---------------------------------------------------------------------------
// Fuzz: equivalence of all four criteria (and of the two algebraic forms
// inside the disjunctive criterion) on seeded random pairs, outside the
// |thm1 margin| <= band exclusion zone, plus optional comparison against the
// geometric feasibility oracle.
// ---------------------------------------------------------------------------

struct FuzzStats {
    long total = 0;
    long excluded = 0;
    long disagreements = 0;
    std::array<std::array<long, 4>, 4> matrix{};
    qjm::IdentityResiduals identities;
    long form_mismatch = 0;
};

bool fuzz_one(const qjm::SimpleObservable& a, const qjm::SimpleObservable& b, double band,
              FuzzStats& st) {
    const qjm::PairContext ctx = qjm::pair_context(a, b);
    st.identities.update(ctx);
    ++st.total;
    const double t1 = qjm::thm1_margin(ctx);
    if (std::abs(t1) <= band) {
        ++st.excluded;
        return true;
    }
    const std::array<qjm::Verdict, 4> v{qjm::jm_thm1(ctx, 0.0), qjm::jm_thm2(ctx, 0.0),
                                        qjm::jm_srh(ctx, 0.0), qjm::jm_bs(ctx, 0.0)};
    bool ok = true;
    for (int i = 0; i < 4; ++i) {
        for (int k = i + 1; k < 4; ++k) {
            if (v[i].decision != v[k].decision) {
                ++st.matrix[i][k];
                ok = false;
            }
        }
    }
    if (ctx.s > 0.0) {
        const double rform = qjm::thm2_r_form_margin(ctx);
        if (std::min(std::abs(v[1].margin), std::abs(rform)) > band &&
            (v[1].margin > 0) != (rform > 0)) {
            ++st.form_mismatch;
            ok = false;
        }
    }
    if (!ok) ++st.disagreements;
    return ok;
}

int cmd_fuzz(long samples, std::uint64_t seed, double tol, long oracle_samples, double grid) {
    (void)tol;
    constexpr double kBand = 1e-7;
    qjm::PairSampler sampler(seed);
    FuzzStats st;
    bool all_ok = true;

    for (long i = 0; i < samples; ++i) {
        const auto [a, b] = sampler.pair();
        if (!fuzz_one(a, b, kBand, st)) {
            all_ok = false;
            std::cout << "disagreement at pair " << pair_json({a, b}) << "\n";
        }
    }
    const long boundary_target = samples / 10;
    long boundary_done = 0;
    for (long i = 0; i < boundary_target; ++i) {
        const auto p = sampler.boundary_pair();
        if (!p) continue;
        ++boundary_done;
        if (!fuzz_one(p->first, p->second, kBand, st)) {
            all_ok = false;
            std::cout << "disagreement at boundary pair " << pair_json({p->first, p->second})
                      << "\n";
        }
    }

    long oracle_checked = 0, oracle_agree = 0;
    for (long i = 0; i < oracle_samples;) {
        const auto [a, b] = sampler.pair();
        const qjm::PairContext ctx = qjm::pair_context(a, b);
        const double t1 = qjm::thm1_margin(ctx);
        if (std::abs(t1) <= 1e-4) continue;
        ++i;
        ++oracle_checked;
        const qjm::Verdict o = qjm::oracle_jm(ctx, grid, 3);
        if ((o.decision == qjm::Decision::JointlyMeasurable) == (t1 > 0)) {
            ++oracle_agree;
        } else {
            all_ok = false;
            std::cout << "oracle disagreement (thm1 margin " << num(t1) << ") at pair "
                      << pair_json({a, b}) << "\n";
        }
    }

    std::cout << "samples=" << st.total << " excluded_in_band=" << st.excluded
              << " boundary_targeted=" << boundary_done << "\n";
    std::cout << "criteria=[thm1,thm2,srh,bs]\n";
    static const char* names[4] = {"thm1", "thm2", "srh", "bs"};
    for (int i = 0; i < 4; ++i)
        for (int k = i + 1; k < 4; ++k)
            std::cout << "disagreements_" << names[i] << "_" << names[k] << "="
                      << st.matrix[i][k] << "\n";
    std::cout << "form_mismatch_thm2=" << st.form_mismatch << "\n";
    for (const auto& row : qjm::identity_rows(st.identities))
        std::cout << "max_residual_" << row.name << "=" << num(row.residual) << "\n";
    if (oracle_checked > 0)
        std::cout << "oracle_checked=" << oracle_checked << " oracle_agree=" << oracle_agree
                  << "\n";
    std::cout << "disagreements_total=" << st.disagreements << "\n";
    return all_ok ? kExitOk : kExitViolation;
}

int cmd_identities(long samples, std::uint64_t seed) {
    qjm::PairSampler sampler(seed);
    qjm::IdentityResiduals acc;
    for (long i = 0; i < samples; ++i) {
        const auto [a, b] = sampler.pair();
        acc.update(qjm::pair_context(a, b));
    }
    std::cout << "identity,max_residual\n";
    for (const auto& row : qjm::identity_rows(acc))
        std::cout << row.name << "," << num(row.residual) << "\n";
    std::cout << "bs55_sign_mismatches," << acc.bs55_sign_mismatch << "\n";
    return acc.pass() ? kExitOk : kExitViolation;
}

int cmd_simulate(const std::string& path, const std::string& state_text, std::uint64_t n_draws,
                 std::uint64_t seed, double tol) {
    const PairInput p = load_pair(path);
    qjm::JointObservable j;
    try {
        j = qjm::construct_joint(p.a, p.b, tol);
    } catch (const qjm::incompatible_pair& e) {
        std::cerr << e.what() << "\n";
        return kExitIncompatible;
    }
    const qjm::QubitState st = qjm::make_state(parse_triple(state_text, "--state"));
    const auto probs = qjm::outcome_probabilities(j, st);
    const auto counts = qjm::sample_outcomes(j, st, n_draws, seed);
    const qjm::MarginalCheckReport rep = qjm::empirical_marginal_check(counts, p.a, p.b, st);

    std::string out = "{\"input\":" + pair_json(p) + ",\"state\":" + vec(st.r) +
                      ",\"n\":" + std::to_string(n_draws) + ",\"seed\":" + std::to_string(seed);
    out += ",\"case\":" + quoted(to_string(j.provenance));
    out += ",\"probabilities\":[";
    for (std::size_t k = 0; k < 4; ++k) out += (k ? "," : "") + num(probs[k]);
    out += "],\"counts\":[";
    for (std::size_t k = 0; k < 4; ++k)
        out += (k ? "," : "") + std::to_string(counts[k]);
    out += "],\"z_scores\":{\"A+\":" + num(rep.z_a_plus) + ",\"A-\":" + num(rep.z_a_minus) +
           ",\"B+\":" + num(rep.z_b_plus) + ",\"B-\":" + num(rep.z_b_minus) +
           ",\"max_abs\":" + num(rep.max_abs_z) + "}}";
    std::cout << out << "\n";
    return rep.pass(5.0) ? kExitOk : kExitViolation;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"joint measurability of two-outcome qubit observables"};
    app.require_subcommand(1);

    std::string pair_path, m_text = "0.8", state_text = "0,0,0", criterion = "thm1";
    double tol = qjm::kDefaultTol;
    double x = 0.0, y = 0.0, costheta = 0.0, grid = 2e-3;
    int angles = 360, points = 200;
    long samples = 100000, oracle_samples = 0;
    std::uint64_t seed = 42, n_draws = 1000000;

    auto* check = app.add_subcommand("check", "evaluate all four compatibility criteria");
    check->add_option("pair", pair_path, "pair JSON file")->required();
    check->add_option("--tol", tol, "verdict tolerance");

    auto* construct = app.add_subcommand("construct", "build and verify a joint observable");
    construct->add_option("pair", pair_path, "pair JSON file")->required();
    construct->add_option("--tol", tol, "positivity verification tolerance");

    auto* boundary = app.add_subcommand("boundary", "admissible-sharpness boundary scan (CSV)");
    boundary->add_option("--x", x, "bias of the fixed observable")->required();
    boundary->add_option("--m", m_text, "sharpness or Bloch vector of the fixed observable")
        ->required();
    boundary->add_option("--y", y, "bias of the partner")->required();
    boundary->add_option("--angles", angles, "number of angle samples in [0, pi]");
    boundary->add_option("--tol", tol, "bisection tolerance");
    boundary->add_option("--criterion", criterion, "thm1|thm2|srh|bs");

    auto* tradeoff = app.add_subcommand("tradeoff", "sharpness trade-off curve (CSV)");
    tradeoff->add_option("--x", x, "first bias")->required();
    tradeoff->add_option("--y", y, "second bias")->required();
    tradeoff->add_option("--costheta", costheta, "cosine of the Bloch angle")->required();
    tradeoff->add_option("--points", points, "number of sharpness samples");
    tradeoff->add_option("--tol", tol, "bisection tolerance");

    auto* fuzz = app.add_subcommand("fuzz", "criterion equivalence fuzz harness");
    fuzz->add_option("--samples", samples, "number of random pairs");
    fuzz->add_option("--seed", seed, "RNG seed");
    fuzz->add_option("--tol", tol, "verdict tolerance");
    fuzz->add_option("--oracle-samples", oracle_samples,
                     "pairs to compare against the geometric oracle");
    fuzz->add_option("--grid", grid, "oracle grid resolution");

    auto* identities = app.add_subcommand("identities", "identity residual suite");
    identities->add_option("--samples", samples, "number of random pairs");
    identities->add_option("--seed", seed, "RNG seed");

    auto* simulate = app.add_subcommand("simulate", "sample a joint measurement on a state");
    simulate->add_option("pair", pair_path, "pair JSON file")->required();
    simulate->add_option("--state", state_text, "Bloch vector of the state, \"x,y,z\"");
    simulate->add_option("--n", n_draws, "number of draws");
    simulate->add_option("--seed", seed, "RNG seed");
    simulate->add_option("--tol", tol, "construction tolerance");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return e.get_exit_code() == 0 ? kExitOk : kExitInput;
    }

    try {
        if (app.got_subcommand(check)) return cmd_check(pair_path, tol);
        if (app.got_subcommand(construct)) return cmd_construct(pair_path, tol);
        if (app.got_subcommand(boundary))
            return cmd_boundary(x, m_text, y, angles, tol, criterion);
        if (app.got_subcommand(tradeoff)) return cmd_tradeoff(x, y, costheta, points, tol);
        if (app.got_subcommand(fuzz))
            return cmd_fuzz(samples, seed, tol, oracle_samples, grid);
        if (app.got_subcommand(identities)) return cmd_identities(samples, seed);
        if (app.got_subcommand(simulate))
            return cmd_simulate(pair_path, state_text, n_draws, seed, tol);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInput;
    }
    return kExitInput;
}

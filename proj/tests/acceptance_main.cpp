// Acceptance suite: one line per criterion clause, nonzero exit when any
// clause fails. Usage: acceptance_suite <path-to-cli> <scratch-dir>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "cocoflow/applications.hpp"
#include "cocoflow/cli.hpp"
#include "cocoflow/diagnostics.hpp"
#include "cocoflow/io.hpp"
#include "cocoflow/scenarios.hpp"
#include "cocoflow/sharpness.hpp"
#include "test_oracles.hpp"

using namespace cocoflow;
namespace fs = std::filesystem;

namespace {

int g_failures = 0;

void check(const std::string& name, bool ok, const std::string& detail = "") {
    std::printf("[%s] %s%s%s\n", ok ? "PASS" : "FAIL", name.c_str(), detail.empty() ? "" : " -- ",
                detail.c_str());
    if (!ok) ++g_failures;
}

std::string cli_path;
std::string scratch;

int run_cli(const std::string& args) {
    const std::string cmd = cli_path + " " + args + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    if (status == -1) return -1;
    return WEXITSTATUS(status);
}

std::string slurp(const std::string& path) { return read_text_file(path); }

// ---------------------------------------------------------------------------
// criterion 1: sharpness grid against the eigenvalue oracle
// ---------------------------------------------------------------------------

void criterion_sharpness_grid() {
    const int ng = 20, nt = 20;
    bool oracle_ok = true, three_way_ok = true, high_theta_ok = true;
    std::vector<std::string> low_theta_failures;
    bool flags_ok = true;

    for (int i = 0; i < ng; ++i) {
        const double gamma = 0.5 + (4.0 - 0.5) * i / (ng - 1.0);
        for (int j = 0; j < nt; ++j) {
            const double theta = 0.05 + (4.0 - 0.05) * j / (nt - 1.0);
            const double lambda = theta / (gamma * gamma);
            StabilityVerdict v;
            try {
                v = classify(RotationCase{gamma, lambda});
            } catch (const Error&) {
                three_way_ok = false;
                continue;
            }
            const double max_re =
                oracle::max_real_eigenvalue_part(oracle::companion_matrix(yosida_rotation_matrix(lambda), gamma));
            if (std::abs(v.roots.a2 - max_re) > 1e-9) oracle_ok = false;
            if (std::abs(max_re) > 1e-9 &&
                (v.verdict == Stability::NonConverging) != (max_re >= 0.0))
                oracle_ok = false;

            const bool nc = v.verdict == Stability::NonConverging;
            if (nc != v.cir1_nonconverging || nc != v.theta_form_nonconverging) three_way_ok = false;

            if (theta >= 1.0001 && v.verdict != Stability::Converging) high_theta_ok = false;
            if (theta <= 0.95 && v.verdict != Stability::NonConverging) {
                char buf[120];
                std::snprintf(buf, sizeof(buf), "(gamma=%.4g, theta=%.4g, a2=%.4g)", gamma, theta, v.roots.a2);
                low_theta_failures.push_back(buf);
                if (v.claim_matches_roots) flags_ok = false;  // the disagreement must be flagged
            }
        }
    }
    check("criterion 1a: root classification matches the companion eigenvalue oracle on the 20x20 grid",
          oracle_ok);
    check("criterion 1b: root-sign, radical-inequality and theta-form criteria agree at every grid point",
          three_way_ok);
    check("criterion 1c: every grid point with theta >= 1.0001 classifies converging", high_theta_ok);

    std::string detail;
    if (!low_theta_failures.empty()) {
        detail = std::to_string(low_theta_failures.size()) + " of 100 tested points are actually converging: ";
        for (const auto& s : low_theta_failures) detail += s + " ";
    }
    check("criterion 1d: every tested point with theta in [0.05,0.95] classifies non-converging",
          low_theta_failures.empty(), detail);
    check("criterion 1d': each such disagreement with the blanket theta-claim is flagged by classify()", flags_ok);
}

// ---------------------------------------------------------------------------
// criterion 2: analytic/numeric agreement for the rotation case
// ---------------------------------------------------------------------------

void criterion_analytic_numeric() {
    double sup_all = 0.0;
    for (const auto& c : {RotationCase{2.0, 1.0}, RotationCase{1.0, 0.5}}) {
        auto sys = SystemSpec::make(c.gamma, PotentialSpec::zero(2),
                                    MonotoneSpec::yosida_of(MonotoneSpec::linear(rotation_matrix()), c.lambda));
        const auto traj = integrate(sys, PhaseState{0.0, Vec{1, 0}, Vec{0, 0}}, 10.0, 1e-3, 100);
        const auto q = fit_coefficients(c, Vec{1, 0}, Vec{0, 0});
        for (const auto& s : traj.samples) {
            const auto [u, v] = closed_form_solution(c, q, s.t);
            sup_all = std::max(sup_all, norm(sub(s.u, u)));
        }
    }
    check("criterion 2a: RK4 at step 1e-3 matches the closed form within 1e-5 on [0,10] for (2,1) and (1,0.5)",
          sup_all <= 1e-5, "sup error " + fmt17(sup_all));

    {
        auto sys = SystemSpec::make(2.0, PotentialSpec::zero(2),
                                    MonotoneSpec::yosida_of(MonotoneSpec::linear(rotation_matrix()), 1.0));
        const auto traj = integrate(sys, PhaseState{0.0, Vec{1, 0}, Vec{0, 0}}, 30.0, 1e-3, 100);
        const double n30 = norm(traj.samples.back().u);
        check("criterion 2b: |u(30)| < 1e-6 in the (2,1) case", n30 < 1e-6,
              "actual " + fmt17(n30) + "; slow root a2 = -0.22311 gives exp(30*a2) ~ 1.2e-3");
    }

    {
        write_text_file(scratch + "/c2.cfg",
                        "scenario.name = yosida-rotation\nscenario.gamma = 1.0\nscenario.lambda = 0.5\n");
        const int code = run_cli("simulate --config " + scratch + "/c2.cfg --out " + scratch + "/c2_out");
        check("criterion 2c: the (1,0.5) run reports non-convergence through exit code 2", code == 2,
              "exit code " + std::to_string(code));
    }
}

// ---------------------------------------------------------------------------
// criterion 3: certificate suite over the convergent catalog
// ---------------------------------------------------------------------------

void criterion_certificates() {
    const std::vector<std::string> names = {"heavy-ball", "contraction-fixed-point", "yosida-rotation",
                                            "gradient-projection"};
    for (const auto& name : names) {
        ScenarioOverrides o;
        o.horizon = 50.0;
        o.step = 1e-3;
        const auto res = run_scenario(name, o);
        const auto& rep = *res.report;
        check("criterion 3: " + name + ": |u'(T)| < 1e-5", rep.final_velocity_norm < 1e-5,
              fmt17(rep.final_velocity_norm));
        check("criterion 3: " + name + ": L2 velocity tail < 1e-4", rep.l2_velocity_tail < 1e-4,
              fmt17(rep.l2_velocity_tail));
        check("criterion 3: " + name + ": Gamma0 monotonicity defect <= 1e-8",
              rep.gamma0_monotonicity_defect <= 1e-8, fmt17(rep.gamma0_monotonicity_defect));
        check("criterion 3: " + name + ": anchor distance oscillation <= 1e-5 over the last half",
              rep.anchor_oscillation <= 1e-5, fmt17(rep.anchor_oscillation));
        check("criterion 3: " + name + ": final equilibrium residual < 1e-5", rep.limit_residual < 1e-5,
              fmt17(rep.limit_residual));
    }
}

// ---------------------------------------------------------------------------
// criterion 4: operator identities
// ---------------------------------------------------------------------------

void criterion_operator_identities() {
    struct Entry {
        std::string name;
        MonotonePtr op;
    };
    std::vector<Entry> catalog;
    catalog.push_back({"identity", MonotoneSpec::linear(Mat::identity(2))});
    catalog.push_back({"rotation", MonotoneSpec::linear(rotation_matrix())});
    catalog.push_back({"yosida-rotation", MonotoneSpec::yosida_of(MonotoneSpec::linear(rotation_matrix()), 1.0)});
    catalog.push_back({"grad-quadratic",
                       MonotoneSpec::gradient(PotentialSpec::quadratic(Mat(2, 2, {2, 0.5, 0.5, 1}), Vec{0.1, -0.3}))});
    catalog.push_back({"grad-power", MonotoneSpec::gradient(PotentialSpec::separable_power(Vec{1.0, 0.5}, 4.0))});
    const double cc = 0.5 * std::cos(0.7), ss = 0.5 * std::sin(0.7);
    catalog.push_back(
        {"contraction-residual", MonotoneSpec::contraction_residual(ContractionSpec::linear(Mat(2, 2, {cc, -ss, ss, cc})))});
    catalog.push_back({"projection-residual",
                       MonotoneSpec::projection_residual(PotentialSpec::half_sq_dist(Vec{2.0, 0.0}),
                                                         ConvexSetSpec::ball(zeros(2), 1.0), 0.5)});
    catalog.push_back({"epi-hypo", epi_hypo_regularize(SaddleSpec::bilinear_scalar(0.5), 1.0)});

    const double tol = 1e-10;
    bool defining_ok = true, identity_ok = true;
    Rng rng(1001);
    for (const auto& e : catalog) {
        for (int k = 0; k < 100; ++k) {
            const double lambda = rng.uniform(0.3, 1.5);
            const double mu = rng.uniform(0.3, 1.5);
            const Vec v = rng.vec_in_ball(2, 2.0);
            const Vec x = e.op->resolvent(lambda, v, tol);
            Vec resid = add(x, scale(lambda, e.op->apply(x)));
            axpy(-1.0, v, resid);
            if (norm(resid) > tol) defining_ok = false;

            const Vec lhs = resolvent_of_yosida(*e.op, lambda, mu, v, tol);
            const Vec rhs = MonotoneSpec::yosida_of(e.op, lambda, tol)->resolvent(mu, v, tol);
            if (norm(sub(lhs, rhs)) > 10.0 * tol) identity_ok = false;
        }
    }
    check("criterion 4: resolvent defining relation |x + lambda A x - v| <= tol across the catalog", defining_ok);
    check("criterion 4: resolvent identity within 10*tol on 100 random inputs per catalog operator", identity_ok);

    bool yosida_ok = true;
    for (double lambda : {0.5, 1.0, 2.0}) {
        for (const auto& base :
             {MonotoneSpec::linear(rotation_matrix()), MonotoneSpec::linear(Mat::identity(2)),
              MonotoneSpec::gradient(PotentialSpec::separable_power(Vec{1.0, 0.5}, 4.0))}) {
            auto y = MonotoneSpec::yosida_of(base, lambda, 1e-12);
            if (cocoercivity_estimate(*y, 100, 2.0, 77) < lambda - 1e-9) yosida_ok = false;
        }
    }
    check("criterion 4: Yosida cocoercivity witness >= lambda - 1e-9", yosida_ok);

    auto contr = MonotoneSpec::contraction_residual(ContractionSpec::linear(Mat(2, 2, {cc, -ss, ss, cc})));
    check("criterion 4: contraction-residual cocoercivity witness >= 1/2 - 1e-9",
          cocoercivity_estimate(*contr, 200, 3.0, 78) >= 0.5 - 1e-9);

    auto gq = PotentialSpec::quadratic(Mat(2, 2, {3, 1, 1, 2}), zeros(2));
    const double lmax = *gq->grad_lipschitz();
    check("criterion 4: quadratic gradient cocoercivity witness >= 1/Lmax - 1e-9",
          cocoercivity_estimate(*MonotoneSpec::gradient(gq), 200, 3.0, 79) >= 1.0 / lmax - 1e-9);

    bool fd_ok = true;
    std::vector<PotentialPtr> pots;
    pots.push_back(gq);
    pots.push_back(PotentialSpec::separable_power(Vec{1.0, 0.4}, 4.0));
    pots.push_back(PotentialSpec::half_sq_dist(Vec{1.0, -1.0}));
    pots.push_back(PotentialSpec::sum({gq, PotentialSpec::half_sq_norm(2)}));
    pots.push_back(PotentialSpec::zero(2));
    for (const auto& p : pots) {
        for (int k = 0; k < 100; ++k) {
            const Vec x = rng.uniform_vec(p->dim(), -3, 3);
            const Vec g = p->gradient(x);
            const Vec fd = oracle::finite_difference_gradient(*p, x);
            if (norm(sub(g, fd)) > 1e-5 * (1.0 + norm(g))) fd_ok = false;
        }
    }
    check("criterion 4: analytic gradients match central finite differences (1e-5 relative, 100 points each)",
          fd_ok);
}

// ---------------------------------------------------------------------------
// criterion 5: Tikhonov selection at the pinned parameters
// ---------------------------------------------------------------------------

void criterion_tikhonov() {
    ScenarioOverrides o;
    o.eps_kind = "power";
    o.eps_c = 1.0;
    o.eps_p = 1.0;
    o.gamma = 2.0;
    o.horizon = 200.0;
    o.step = 1e-3;
    o.init_u = Vec{1.0, 1.0};
    o.init_v = Vec{0.0, 0.0};
    const auto res = run_scenario("tikhonov-min-norm", o);
    const double limit_norm = res.summary.at("limit_norm").get<double>();
    const double vi = res.summary.at("vi_residual").get<double>();
    check("criterion 5: |u(200)| <= 1e-3 with eps(t) = 1/(1+t)", limit_norm <= 1e-3,
          "actual " + fmt17(limit_norm) + "; flat mode decays like (1+t)^(-1/2) ~ 7e-2 at T=200");
    check("criterion 5: VI residual over the 5-point probe <= 1e-3", vi <= 1e-3, "actual " + fmt17(vi));
}

// ---------------------------------------------------------------------------
// criterion 6: time-rescaling invariance
// ---------------------------------------------------------------------------

void criterion_rescaling() {
    for (double k : {2.0, 3.0}) {
        ScenarioOverrides o;
        o.rescale_k = k;
        o.step = 1e-4;
        const auto res = run_scenario("rescale-check", o);
        const double sup = res.summary.at("sup_error").get<double>();
        const bool bit = res.summary.at("product_bit_identical").get<bool>();
        check("criterion 6: k=" + fmt17(k) + ": rescaled trajectory matches u(k s) within 1e-6", sup <= 1e-6,
              "sup error " + fmt17(sup));
        check("criterion 6: k=" + fmt17(k) + ": recorded lambda*gamma^2 is bit-identical", bit);
    }
}

// ---------------------------------------------------------------------------
// criterion 7: strong monotonicity
// ---------------------------------------------------------------------------

void criterion_strong_monotonicity() {
    auto sys = SystemSpec::make(2.0, PotentialSpec::half_sq_norm(2),
                                MonotoneSpec::yosida_of(MonotoneSpec::linear(rotation_matrix()), 1.0));
    const double eta = strong_monotonicity_estimate(sys, 200, 3.0, 4321);
    check("criterion 7: strong monotonicity witness of I + B_1 >= 1.4", eta >= 1.4, fmt17(eta));
    const auto traj = integrate(sys, PhaseState{0.0, Vec{1, 1}, Vec{0, 0}}, 50.0, 1e-3, 100);
    const double dist = norm(traj.samples.back().u);
    check("criterion 7: |u(50)| < 1e-6", dist < 1e-6, fmt17(dist));
}

// ---------------------------------------------------------------------------
// criterion 8: game consistency
// ---------------------------------------------------------------------------

void criterion_games() {
    GameSpec game(PotentialSpec::half_sq_norm(1), PotentialSpec::half_sq_norm(1), Mat(1, 1, {1.0}),
                  Mat(1, 1, {1.0}), SaddleSpec::bilinear_scalar(0.5), 1.0);

    const auto sys = build_game_system(game, 2.0);
    const auto traj = integrate(sys, PhaseState{0.0, Vec{1, -1}, Vec{0, 0}}, 50.0, 1e-3, 100);
    const Vec cont_limit = traj.samples.back().u;
    check("criterion 8: continuous game limit within 1e-4 of the Nash point (0,0)", norm(cont_limit) <= 1e-4,
          fmt17(norm(cont_limit)));

    const auto iterates =
        best_response_discrete(game, BestResponseParams(0.5, 0.5, 0.2, 200), Vec{1, -1}, Vec{1, -1});
    const Vec disc_limit = iterates.back();
    check("criterion 8: discrete best-response limit within 1e-4 of the Nash point", norm(disc_limit) <= 1e-4,
          fmt17(norm(disc_limit)));

    const double r1 = nash_residual(game, cont_limit);
    const double r2 = nash_residual(game, disc_limit);
    check("criterion 8: stationarity residual <= 1e-6 at both limits", r1 <= 1e-6 && r2 <= 1e-6,
          fmt17(r1) + " / " + fmt17(r2));

    // zero coupling: the product dynamics must equal two independent runs
    GameSpec split(PotentialSpec::half_sq_norm(1), PotentialSpec::half_sq_norm(1), std::nullopt, std::nullopt,
                   SaddleSpec(Mat(1, 1), Mat(1, 1), Mat(1, 1), Vec{0}, Vec{0}), 1.0);
    const auto psys = build_game_system(split, 2.0);
    const auto ptraj = integrate(psys, PhaseState{0.0, Vec{1.0, -0.5}, Vec{0.0, 0.0}}, 20.0, 1e-3, 100);
    double worst = 0.0;
    for (std::size_t comp = 0; comp < 2; ++comp) {
        const auto single = SystemSpec::make(2.0, PotentialSpec::half_sq_norm(1), MonotoneSpec::zero(1));
        const auto part = integrate(single, PhaseState{0.0, Vec{comp == 0 ? 1.0 : -0.5}, Vec{0.0}}, 20.0, 1e-3, 100);
        for (std::size_t i = 0; i < part.samples.size(); ++i)
            worst = std::max(worst, std::abs(part.samples[i].u[0] - ptraj.samples[i].u[comp]));
    }
    check("criterion 8: zero-coupling product system matches independent component runs to 1e-12", worst <= 1e-12,
          fmt17(worst));
}

// ---------------------------------------------------------------------------
// criterion 9: CLI determinism and round trips
// ---------------------------------------------------------------------------

void criterion_cli() {
    const std::string cfg = scratch + "/det.cfg";
    write_text_file(cfg,
                    "scenario.name = yosida-rotation\nscenario.gamma = 1.0\nscenario.lambda = 3.0\n"
                    "integrator.horizon = 5\nseed = 42\n");

    // exit 2 is a legitimate verdict outcome at this short horizon; the
    // determinism claim is about the bytes written
    const int c1 = run_cli("simulate --config " + cfg + " --out " + scratch + "/run1");
    const int c2 = run_cli("simulate --config " + cfg + " --out " + scratch + "/run2");
    bool identical = c1 == c2 && (c1 == 0 || c1 == 2);
    for (const char* f : {"trajectory.csv", "trajectory.jsonl", "report.json", "summary.json", "metadata.json"}) {
        if (!identical) break;
        identical = slurp(scratch + "/run1/" + f) == slurp(scratch + "/run2/" + f);
    }
    check("criterion 9: identical config and seed produce byte-identical outputs", identical,
          "simulate exits " + std::to_string(c1) + "/" + std::to_string(c2));

    const int cr = run_cli("report " + scratch + "/run1/trajectory.jsonl --metadata " + scratch +
                           "/run1/metadata.json --out " + scratch + "/rep1");
    const bool report_ok =
        (cr == 0 || cr == 2) && slurp(scratch + "/rep1/report.json") == slurp(scratch + "/run1/report.json");
    check("criterion 9: simulate -> report round trip reproduces the inline report bit-exactly", report_ok,
          "report exit " + std::to_string(cr));

    const std::string sweep_cfg = scratch + "/sweep.cfg";
    write_text_file(sweep_cfg, "sweep.gamma = 0.5:4:20\nsweep.theta = 0.05:4:20\n");
    const int s1 = run_cli("sweep --config " + sweep_cfg + " --out " + scratch + "/sweep1 --jobs 1");
    const int s4 = run_cli("sweep --config " + sweep_cfg + " --out " + scratch + "/sweep4 --jobs 4");
    const bool sweep_ok = s1 == 0 && s4 == 0 &&
                          slurp(scratch + "/sweep1/sweep.csv") == slurp(scratch + "/sweep4/sweep.csv") &&
                          slurp(scratch + "/sweep1/boundary.csv") == slurp(scratch + "/sweep4/boundary.csv");
    check("criterion 9: parallel sweep output equals serial sweep output", sweep_ok);

    write_text_file(scratch + "/bad.cfg", "scenario.name = heavy-ball\nscenario.gama = 2\n");
    const int cb = run_cli("simulate --config " + scratch + "/bad.cfg --out " + scratch + "/bad_out");
    check("criterion 9: malformed config exits with code 1", cb == 1, "exit code " + std::to_string(cb));
}

}  // namespace

int main(int argc, char** argv) {
    if (argc < 3) {
        std::fprintf(stderr, "usage: acceptance_suite <cli-binary> <scratch-dir>\n");
        return 1;
    }
    cli_path = argv[1];
    scratch = argv[2];
    fs::create_directories(scratch);

    try {
        criterion_sharpness_grid();
        criterion_analytic_numeric();
        criterion_certificates();
        criterion_operator_identities();
        criterion_tikhonov();
        criterion_rescaling();
        criterion_strong_monotonicity();
        criterion_games();
        criterion_cli();
    } catch (const std::exception& e) {
        std::fprintf(stderr, "acceptance suite aborted: %s\n", e.what());
        return 1;
    }

    std::printf("\nacceptance: %d clause(s) failed\n", g_failures);
    return g_failures == 0 ? 0 : 1;
}

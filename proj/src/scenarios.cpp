#include "cocoflow/scenarios.hpp"

#include <cmath>

namespace cocoflow {

using nlohmann::json;

namespace {

json vec_json(const Vec& v) { return json(v); }

EpsilonSchedule schedule_from(const ScenarioOverrides& o, double default_c, double default_p) {
    const std::string kind = o.eps_kind.value_or("power");
    if (kind == "zero") return EpsilonSchedule::zero();
    if (kind == "power") return EpsilonSchedule::power(o.eps_c.value_or(default_c), o.eps_p.value_or(default_p));
    if (kind == "exponential")
        return EpsilonSchedule::exponential(o.eps_c.value_or(default_c), o.eps_a.value_or(1.0));
    throw SpecError("unknown epsilon schedule kind '" + kind + "'");
}

struct RunPieces {
    PhaseState init;
    double horizon;
    double step;
    int sample_every;
};

RunPieces run_pieces(const ScenarioOverrides& o, Vec default_u, Vec default_v, double default_horizon,
                     double default_step = 1e-3, int default_sample = 100) {
    RunPieces r;
    r.init.t = 0.0;
    r.init.u = o.init_u.value_or(std::move(default_u));
    r.init.v = o.init_v.value_or(std::move(default_v));
    r.horizon = o.horizon.value_or(default_horizon);
    r.step = o.step.value_or(default_step);
    r.sample_every = o.sample_every.value_or(default_sample);
    return r;
}

void integrate_and_report(ScenarioResult& res, const SystemSpec& sys, const RunPieces& rp, const Vec& anchor_guess) {
    res.system = sys;
    res.trajectory = integrate(sys, rp.init, rp.horizon, rp.step, rp.sample_every);
    res.anchor = find_equilibrium(sys, anchor_guess, 1e-10);
    res.diagnostics = attach_diagnostics(*res.trajectory, sys, *res.anchor);
    res.report = convergence_report(*res.trajectory, res.diagnostics, sys, *res.anchor);
    res.pass = res.report->pass;

    const auto& rep = *res.report;
    res.summary["anchor"] = vec_json(res.anchor->p);
    res.summary["anchor_residual"] = res.anchor->residual;
    res.summary["limit_estimate"] = vec_json(rep.limit_estimate);
    res.summary["limit_residual"] = rep.limit_residual;
    res.summary["final_velocity_norm"] = rep.final_velocity_norm;
    res.summary["l2_velocity_tail"] = rep.l2_velocity_tail;
    res.summary["anchor_oscillation"] = rep.anchor_oscillation;
    res.summary["gamma0_monotonicity_defect"] = rep.gamma0_monotonicity_defect;
    res.summary["verdict_pass"] = rep.pass;
    if (sys.lambda_gamma_sq()) res.summary["lambda_gamma_sq"] = *sys.lambda_gamma_sq();
}

ContractionPtr catalog_contraction() {
    const double ang = 0.25 * 3.14159265358979323846;
    const double c = 0.5 * std::cos(ang), s = 0.5 * std::sin(ang);
    return ContractionSpec::linear(Mat(2, 2, {c, -s, s, c}));
}

SystemSpec heavy_ball_system(const ScenarioOverrides& o) {
    return SystemSpec::make(o.gamma.value_or(3.0), PotentialSpec::half_sq_norm(2),
                            MonotoneSpec::zero(2, o.lambda.value_or(1.0)));
}

SystemSpec contraction_system(const ScenarioOverrides& o) {
    return SystemSpec::make(o.gamma.value_or(2.0), PotentialSpec::zero(2),
                            MonotoneSpec::contraction_residual(catalog_contraction()));
}

SystemSpec yosida_rotation_system(double gamma, double lambda) {
    return SystemSpec::make(gamma, PotentialSpec::zero(2),
                            MonotoneSpec::yosida_of(MonotoneSpec::linear(rotation_matrix()), lambda));
}

ConstrainedProblem catalog_constrained_problem(const ScenarioOverrides& o) {
    return ConstrainedProblem(PotentialSpec::half_sq_dist(Vec{2.0, 0.0}), ConvexSetSpec::ball(zeros(2), 1.0),
                              o.mu.value_or(0.5));
}

SystemSpec tikhonov_system(const ScenarioOverrides& o) {
    auto phi = PotentialSpec::quadratic(Mat(2, 2, {1.0, 0.0, 0.0, 0.0}), zeros(2), 0.0);
    auto base = SystemSpec::make(o.gamma.value_or(2.0), std::move(phi), MonotoneSpec::zero(2, o.lambda.value_or(1.0)));
    return build_tikhonov_system(base, zeros(2), schedule_from(o, 6.0, 1.0));
}

ScenarioResult scenario_heavy_ball(const ScenarioOverrides& o) {
    ScenarioResult res;
    res.scenario = "heavy-ball";
    auto sys = heavy_ball_system(o);
    const auto rp = run_pieces(o, Vec{1.0, 1.0}, Vec{0.0, 0.0}, 50.0);
    integrate_and_report(res, sys, rp, zeros(2));
    return res;
}

ScenarioResult scenario_contraction_fixed_point(const ScenarioOverrides& o) {
    ScenarioResult res;
    res.scenario = "contraction-fixed-point";
    auto t = catalog_contraction();
    auto sys = contraction_system(o);
    const auto rp = run_pieces(o, Vec{1.0, 1.0}, Vec{0.0, 0.0}, 50.0);
    integrate_and_report(res, sys, rp, zeros(2));
    const Vec u_t = res.report->limit_estimate;
    res.summary["fixed_point_gap"] = norm(sub(t->apply(u_t), u_t));
    return res;
}

ScenarioResult scenario_yosida_rotation(const ScenarioOverrides& o) {
    ScenarioResult res;
    res.scenario = "yosida-rotation";
    const double gamma = o.gamma.value_or(1.0);
    const double lambda = o.lambda.value_or(3.0);
    auto sys = yosida_rotation_system(gamma, lambda);
    const auto rp = run_pieces(o, Vec{1.0, 0.0}, Vec{0.0, 0.0}, 50.0);
    integrate_and_report(res, sys, rp, zeros(2));

    const StabilityVerdict v = classify(RotationCase{gamma, lambda});
    res.summary["theta"] = v.theta;
    res.summary["root_verdict"] = to_string(v.verdict);
    res.summary["a1"] = v.roots.a1;
    res.summary["a2"] = v.roots.a2;
    res.summary["b"] = v.roots.b;
    res.summary["theta_claim_nonconverging"] = v.theta_claim_nonconverging;
    res.summary["claim_matches_roots"] = v.claim_matches_roots;
    // empirical lower-bound witness, sampled from the run seed
    res.summary["cocoercivity_witness_empirical"] = cocoercivity_estimate(sys.op(), 100, 2.0, o.seed);
    return res;
}

ScenarioResult scenario_gradient_projection(const ScenarioOverrides& o) {
    ScenarioResult res;
    res.scenario = "gradient-projection";
    const double gamma = o.gamma.value_or(1.5);
    ConstrainedProblem prob = catalog_constrained_problem(o);
    auto sys = build_gradient_projection_system(prob, gamma);
    const auto rp = run_pieces(o, Vec{2.0, 1.0}, Vec{0.0, 0.0}, 50.0);
    integrate_and_report(res, sys, rp, zeros(2));

    const Vec& u_t = res.report->limit_estimate;
    const Vec inner_step = sub(u_t, scale(prob.mu, prob.g->gradient(u_t)));
    res.summary["projection_fixed_point_gap"] = norm(sub(u_t, prob.c->project(inner_step)));
    return res;
}

ScenarioResult scenario_tikhonov_min_norm(const ScenarioOverrides& o) {
    ScenarioResult res;
    res.scenario = "tikhonov-min-norm";
    // phi = 0.5*x1^2 on R^2, so the equilibrium set is {0} x R and the
    // minimum-norm equilibrium is the origin
    auto sys = tikhonov_system(o);
    const EpsilonSchedule eps = schedule_from(o, 6.0, 1.0);
    const auto rp = run_pieces(o, Vec{1.0, 1.0}, Vec{0.0, 0.0}, 50.0);

    res.system = sys;
    res.trajectory = integrate(sys, rp.init, rp.horizon, rp.step, rp.sample_every);
    // the selected point: minimizer of Theta over the equilibrium set
    res.anchor = find_equilibrium(sys, zeros(2), 1e-10);
    res.diagnostics = attach_diagnostics(*res.trajectory, sys, *res.anchor);
    res.report = convergence_report(*res.trajectory, res.diagnostics, sys, *res.anchor);
    res.pass = res.report->pass;

    // probe the equilibrium set from a spread of guesses
    std::vector<Vec> probes;
    for (double second : {-2.0, -1.0, 0.0, 1.0, 2.0}) {
        probes.push_back(find_equilibrium(sys, Vec{0.0, second}, 1e-10).p);
    }
    const Vec& u_t = res.report->limit_estimate;
    auto theta = PotentialSpec::half_sq_dist(zeros(2));
    const double vi = vi_residual(*theta, probes, u_t);

    res.summary["limit_estimate"] = vec_json(u_t);
    res.summary["limit_norm"] = norm(u_t);
    res.summary["vi_residual"] = vi;
    res.summary["slow_decay"] = eps.slow_decay();
    res.summary["verdict_pass"] = res.pass;
    res.summary["final_velocity_norm"] = res.report->final_velocity_norm;
    return res;
}

GameSpec catalog_game(const ScenarioOverrides& o) {
    const double coupling = o.coupling.value_or(0.5);
    const double lambda_saddle = o.lambda_saddle.value_or(1.0);
    return GameSpec(PotentialSpec::half_sq_norm(1), PotentialSpec::half_sq_norm(1), Mat(1, 1, {1.0}),
                    Mat(1, 1, {1.0}), SaddleSpec::bilinear_scalar(coupling), lambda_saddle);
}

ScenarioResult scenario_game_continuous(const ScenarioOverrides& o) {
    ScenarioResult res;
    res.scenario = "game-continuous";
    const double gamma = o.gamma.value_or(2.0);
    const GameSpec game = catalog_game(o);
    auto sys = build_game_system(game, gamma);
    const auto rp = run_pieces(o, Vec{1.0, -1.0}, Vec{0.0, 0.0}, 50.0);
    integrate_and_report(res, sys, rp, zeros(2));

    const Vec& u_t = res.report->limit_estimate;
    res.summary["nash_residual"] = nash_residual(game, u_t);
    res.summary["nash_residual_raw"] = nash_residual_raw(game, u_t);
    res.summary["cocoercivity_witness_empirical"] = cocoercivity_estimate(sys.op(), 100, 2.0, o.seed);
    return res;
}

ScenarioResult scenario_game_discrete(const ScenarioOverrides& o) {
    ScenarioResult res;
    res.scenario = "game-discrete";
    const GameSpec game = catalog_game(o);
    BestResponseParams params(o.alpha.value_or(0.5), o.nu.value_or(0.5), o.beta.value_or(0.2),
                              o.iterations.value_or(200));
    const Vec start = o.init_u.value_or(Vec{1.0, -1.0});
    const auto iterates = best_response_discrete(game, params, start, start);

    const Vec& last = iterates.back();
    const double resid = nash_residual(game, last);
    res.pass = resid <= 1e-6;
    res.summary["iterations"] = params.iterations;
    res.summary["final_iterate"] = vec_json(last);
    res.summary["nash_residual"] = resid;
    res.summary["nash_residual_raw"] = nash_residual_raw(game, last);
    res.summary["verdict_pass"] = res.pass;
    json seq = json::array();
    for (const auto& it : iterates) seq.push_back(vec_json(it));
    res.summary["iterates"] = std::move(seq);
    return res;
}

ScenarioResult scenario_rescale_check(const ScenarioOverrides& o) {
    ScenarioResult res;
    res.scenario = "rescale-check";
    const double gamma = o.gamma.value_or(2.0);
    const double lambda = o.lambda.value_or(1.0);
    const double k = o.rescale_k.value_or(2.0);
    if (!(k > 0.0)) throw SpecError("rescale-check: k must be positive");

    auto sys = yosida_rotation_system(gamma, lambda);
    const auto rp = run_pieces(o, Vec{1.0, 0.0}, Vec{0.0, 0.0}, 10.0, 1e-4, 100);

    const Trajectory base = integrate(sys, rp.init, rp.horizon, rp.step, rp.sample_every);
    const SystemSpec rescaled = time_rescale(sys, k);

    PhaseState init_rescaled{rp.init.t, rp.init.u, scale(k, rp.init.v)};
    const double sample_dt = rp.step * rp.sample_every;
    const long long n_rescaled = static_cast<long long>(std::floor(rp.horizon / k / sample_dt + 1e-9));
    const double s_end = static_cast<double>(n_rescaled) * sample_dt;
    const Trajectory scaled = integrate(rescaled, init_rescaled, s_end, rp.step, rp.sample_every);

    // v(s) should reproduce u(k s); compare on the shared sample grid
    const long long stride = std::llround(k);
    const bool k_integral = std::abs(k - static_cast<double>(stride)) < 1e-12;
    double sup_err = 0.0;
    std::size_t compared = 0;
    if (k_integral) {
        for (std::size_t j = 0; j < scaled.samples.size(); ++j) {
            const std::size_t base_idx = j * static_cast<std::size_t>(stride);
            if (base_idx >= base.samples.size()) break;
            sup_err = std::max(sup_err, norm(sub(scaled.samples[j].u, base.samples[base_idx].u)));
            ++compared;
        }
    }

    const bool product_recorded = sys.lambda_gamma_sq().has_value() && rescaled.lambda_gamma_sq().has_value();
    const bool bit_identical = product_recorded && *sys.lambda_gamma_sq() == *rescaled.lambda_gamma_sq();

    res.system = sys;
    res.trajectory = base;
    res.pass = bit_identical && (!k_integral || sup_err <= 1e-6);
    res.summary["k"] = k;
    res.summary["sup_error"] = sup_err;
    res.summary["compared_samples"] = compared;
    res.summary["lambda_gamma_sq_base"] = sys.lambda_gamma_sq() ? json(*sys.lambda_gamma_sq()) : json();
    res.summary["lambda_gamma_sq_rescaled"] =
        rescaled.lambda_gamma_sq() ? json(*rescaled.lambda_gamma_sq()) : json();
    res.summary["product_bit_identical"] = bit_identical;
    res.summary["verdict_pass"] = res.pass;
    return res;
}

ScenarioResult scenario_sharpness_sweep(const ScenarioOverrides& o) {
    ScenarioResult res;
    res.scenario = "sharpness-sweep";
    const int ng = 20, nt = 20;
    const double g_lo = 0.5, g_hi = 4.0;
    const double th_lo = 0.05, th_hi = 4.0;
    (void)o;
    int disagreements = 0;
    for (int i = 0; i < ng; ++i) {
        const double g = g_lo + (g_hi - g_lo) * static_cast<double>(i) / (ng - 1);
        for (int j = 0; j < nt; ++j) {
            const double theta = th_lo + (th_hi - th_lo) * static_cast<double>(j) / (nt - 1);
            const double lambda = theta / (g * g);
            const StabilityVerdict v = classify(RotationCase{g, lambda});
            SweepRow row;
            row.gamma = g;
            row.lambda = lambda;
            row.theta = v.theta;
            row.a1 = v.roots.a1;
            row.a2 = v.roots.a2;
            row.b = v.roots.b;
            row.verdict = to_string(v.verdict);
            row.cir1_nonconverging = v.cir1_nonconverging;
            row.theta_form_nonconverging = v.theta_form_nonconverging;
            row.theta_claim_nonconverging = v.theta_claim_nonconverging;
            row.claim_matches_roots = v.claim_matches_roots;
            if (!v.claim_matches_roots) ++disagreements;
            res.sweep_rows.push_back(std::move(row));
        }
    }
    for (int i = 0; i < ng; ++i) {
        const double g = g_lo + (g_hi - g_lo) * static_cast<double>(i) / (ng - 1);
        res.boundary.emplace_back(g, 1.0 / (g * g));
    }
    res.summary["grid_points"] = ng * nt;
    res.summary["theta_claim_vs_roots_disagreements"] = disagreements;
    res.pass = true;
    return res;
}

}  // namespace

const std::vector<std::string>& scenario_names() {
    static const std::vector<std::string> names = {
        "heavy-ball",        "contraction-fixed-point", "yosida-rotation",
        "gradient-projection", "tikhonov-min-norm",     "game-continuous",
        "game-discrete",     "rescale-check",           "sharpness-sweep"};
    return names;
}

bool is_scenario(const std::string& name) {
    for (const auto& n : scenario_names())
        if (n == name) return true;
    return false;
}

ScenarioResult run_scenario(const std::string& name, const ScenarioOverrides& overrides) {
    if (name == "heavy-ball") return scenario_heavy_ball(overrides);
    if (name == "contraction-fixed-point") return scenario_contraction_fixed_point(overrides);
    if (name == "yosida-rotation") return scenario_yosida_rotation(overrides);
    if (name == "gradient-projection") return scenario_gradient_projection(overrides);
    if (name == "tikhonov-min-norm") return scenario_tikhonov_min_norm(overrides);
    if (name == "game-continuous") return scenario_game_continuous(overrides);
    if (name == "game-discrete") return scenario_game_discrete(overrides);
    if (name == "rescale-check") return scenario_rescale_check(overrides);
    if (name == "sharpness-sweep") return scenario_sharpness_sweep(overrides);
    throw SpecError("unknown scenario '" + name + "'");
}

std::optional<ScenarioSystem> build_scenario_system(const std::string& name, const ScenarioOverrides& o) {
    if (name == "heavy-ball") return ScenarioSystem{heavy_ball_system(o), zeros(2)};
    if (name == "contraction-fixed-point") return ScenarioSystem{contraction_system(o), zeros(2)};
    if (name == "yosida-rotation")
        return ScenarioSystem{yosida_rotation_system(o.gamma.value_or(1.0), o.lambda.value_or(3.0)), zeros(2)};
    if (name == "gradient-projection")
        return ScenarioSystem{build_gradient_projection_system(catalog_constrained_problem(o), o.gamma.value_or(1.5)),
                              zeros(2)};
    if (name == "tikhonov-min-norm") return ScenarioSystem{tikhonov_system(o), zeros(2)};
    if (name == "game-continuous")
        return ScenarioSystem{build_game_system(catalog_game(o), o.gamma.value_or(2.0)), zeros(2)};
    if (name == "rescale-check")
        return ScenarioSystem{yosida_rotation_system(o.gamma.value_or(2.0), o.lambda.value_or(1.0)), zeros(2)};
    if (!is_scenario(name)) throw SpecError("unknown scenario '" + name + "'");
    return std::nullopt;
}

}  // namespace cocoflow

#include "cocoflow/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace cocoflow {

namespace {

Vec equilibrium_map(const SystemSpec& sys, const Vec& u) {
    return add(sys.phi().gradient(u), sys.op().apply(u));
}

}  // namespace

AnchorPoint find_equilibrium(const SystemSpec& sys, const Vec& guess, double tol) {
    if (guess.size() != sys.dim()) throw DimensionError("find_equilibrium: guess dimension mismatch");

    Vec u = guess;
    Vec f = equilibrium_map(sys, u);
    double r = norm(f);
    if (r <= tol) return AnchorPoint{u, r};

    // Damped fixed point u <- u - s (grad phi + A)(u) with a backtracking step;
    // covers the cocoercive catalog. A merely monotone residual that stalls is
    // reported with the best residual reached.
    double s = 0.5;
    double best = r;
    Vec best_u = u;
    constexpr int kMaxIter = 20000;
    for (int it = 0; it < kMaxIter; ++it) {
        Vec trial = u;
        axpy(-s, f, trial);
        const Vec ft = equilibrium_map(sys, trial);
        const double rt = norm(ft);
        if (rt <= tol) return AnchorPoint{trial, rt};
        if (rt < r) {
            u = std::move(trial);
            f = ft;
            r = rt;
            if (r < best) {
                best = r;
                best_u = u;
            }
            s = std::min(s * 1.1, 1.0);
        } else {
            s *= 0.5;
            if (s < 1e-12) break;
        }
    }
    throw IterationError("find_equilibrium: no convergence (best residual " + fmt17(best) + ")", best);
}

double gamma0(const SystemSpec& sys, const AnchorPoint& anchor, const PhaseState& s) {
    if (!sys.lambda()) throw SpecError("gamma0: operator carries no claimed cocoercivity constant");
    if (sys.tikhonov()) throw SpecError("gamma0: defined for systems without a Tikhonov term");
    const double lam = *sys.lambda();
    const double gamma = sys.gamma();
    const Vec up = sub(s.u, anchor.p);
    const double h = 0.5 * inner(up, up);
    const double h_dot = inner(up, s.v);
    const Vec gphi_p = sys.phi().gradient(anchor.p);
    return h_dot + gamma * h +
           lam * gamma * (inner(s.v, s.v) + 2.0 * sys.phi().value(s.u) - 2.0 * inner(up, gphi_p));
}

double gamma1(const SystemSpec& sys, const AnchorPoint& anchor, const PhaseState& s) {
    if (!sys.lambda()) throw SpecError("gamma1: operator carries no claimed cocoercivity constant");
    if (!sys.tikhonov()) throw SpecError("gamma1: requires a Tikhonov term");
    const double lam = *sys.lambda();
    const double gamma = sys.gamma();
    const Vec up = sub(s.u, anchor.p);
    const double h = 0.5 * inner(up, up);
    const double h_dot = inner(up, s.v);
    const Vec gphi_p = sys.phi().gradient(anchor.p);
    const double eps = sys.tikhonov()->schedule.value(s.t);
    const double theta_bar = sys.tikhonov()->theta_bar(s.u);
    return h_dot + gamma * h +
           lam * gamma *
               (inner(s.v, s.v) + 2.0 * (sys.phi().value(s.u) - inner(up, gphi_p)) + 2.0 * eps * theta_bar);
}

std::vector<DiagnosticsSample> attach_diagnostics(const Trajectory& traj, const SystemSpec& sys,
                                                  const AnchorPoint& anchor) {
    if (anchor.p.size() != sys.dim()) throw DimensionError("attach_diagnostics: anchor dimension mismatch");
    const Vec gphi_p = sys.phi().gradient(anchor.p);
    const Vec a_p = sys.op().apply(anchor.p);
    const bool has_tik = sys.tikhonov().has_value();
    const double lam = sys.lambda() ? *sys.lambda() : 0.0;
    const bool has_lam = sys.lambda().has_value();
    const double gamma = sys.gamma();

    std::vector<DiagnosticsSample> out;
    out.reserve(traj.samples.size());
    for (const auto& s : traj.samples) {
        DiagnosticsSample d;
        d.t = s.t;
        const Vec up = sub(s.u, anchor.p);
        d.h = 0.5 * inner(up, up);
        d.h_dot = inner(up, s.v);

        const Vec gphi_u = sys.phi().gradient(s.u);
        const Vec a_u = sys.op().apply(s.u);
        d.w = inner(sub(gphi_u, gphi_p), up);
        d.a_residual = norm(sub(a_u, a_p));

        Vec eq = add(gphi_u, a_u);
        const double eps = has_tik ? sys.tikhonov()->schedule.value(s.t) : 0.0;
        if (has_tik) axpy(eps, sys.tikhonov()->grad_theta(s.u), eq);
        d.eq_residual = norm(eq);

        // u'' comes from the equation right-hand side, never from differencing
        Vec dvec = add(acceleration(sys, s), gphi_u);
        if (has_tik) axpy(eps, sys.tikhonov()->grad_theta(s.u), dvec);
        dvec = add(dvec, a_p);
        d.d_term = inner(dvec, dvec);

        if (has_lam) {
            const double gphi_val = sys.phi().value(s.u);
            const double base =
                d.h_dot + gamma * d.h + lam * gamma * (inner(s.v, s.v) + 2.0 * gphi_val - 2.0 * inner(up, gphi_p));
            d.gamma0 = base;
            if (has_tik) d.gamma1 = base + lam * gamma * 2.0 * eps * sys.tikhonov()->theta_bar(s.u);
        }
        out.push_back(std::move(d));
    }
    return out;
}

ConvergenceReport convergence_report(const Trajectory& traj, const std::vector<DiagnosticsSample>& diag,
                                     const SystemSpec& sys, const AnchorPoint& anchor, const ToleranceSet& tols) {
    if (traj.samples.empty() || diag.size() != traj.samples.size())
        throw SpecError("convergence_report: diagnostics not attached");

    ConvergenceReport rep;
    rep.tolerances = tols;

    const auto& samples = traj.samples;
    const std::size_t n = samples.size();
    const double t0 = samples.front().t;
    const double t_end = samples.back().t;
    const double horizon = t_end - t0;

    rep.final_velocity_norm = norm(samples.back().v);

    const double tail_start = t_end - tols.tail_fraction * horizon;
    double tail_l2_begin = traj.running_l2_velocity.back();
    for (std::size_t i = 0; i < n; ++i) {
        if (samples[i].t >= tail_start) {
            tail_l2_begin = traj.running_l2_velocity[i];
            break;
        }
    }
    rep.l2_velocity_tail = traj.running_l2_velocity.back() - tail_l2_begin;

    const double half_start = t0 + 0.5 * horizon;
    double osc = 0.0;
    for (std::size_t i = 1; i < n; ++i) {
        if (samples[i - 1].t < half_start) continue;
        const double d_prev = std::sqrt(2.0 * diag[i - 1].h);
        const double d_cur = std::sqrt(2.0 * diag[i].h);
        osc = std::max(osc, d_cur - d_prev);
    }
    rep.anchor_oscillation = std::max(0.0, osc);

    double defect = 0.0;
    for (std::size_t i = 1; i < n; ++i) defect = std::max(defect, diag[i].gamma0 - diag[i - 1].gamma0);
    rep.gamma0_monotonicity_defect = std::max(0.0, defect);

    double dtail = 0.0;
    for (std::size_t i = 1; i < n; ++i) {
        if (samples[i - 1].t < tail_start) continue;
        dtail += 0.5 * (samples[i].t - samples[i - 1].t) * (diag[i].d_term + diag[i - 1].d_term);
    }
    rep.d_term_tail = dtail;

    rep.limit_estimate = samples.back().u;
    rep.limit_residual = norm(add(sys.phi().gradient(rep.limit_estimate), sys.op().apply(rep.limit_estimate)));

    rep.i1_limit_in_solution_set = rep.limit_residual < tols.residual;
    rep.i2_velocity_vanishes = rep.final_velocity_norm < tols.velocity && rep.l2_velocity_tail < tols.l2_tail;
    rep.i3_residual_integrable = rep.d_term_tail < tols.l2_tail;
    rep.i4_anchor_distance_settles = rep.anchor_oscillation <= tols.oscillation;
    rep.pass = rep.i1_limit_in_solution_set && rep.i2_velocity_vanishes && rep.i3_residual_integrable &&
               rep.i4_anchor_distance_settles;
    (void)anchor;
    return rep;
}

double vi_residual(const PotentialSpec& theta, const std::vector<Vec>& s_probe, const Vec& u_star) {
    if (s_probe.empty()) throw SpecError("vi_residual: empty probe set");
    const Vec g = theta.gradient(u_star);
    double worst = 0.0;
    for (const auto& v : s_probe) {
        const double val = -inner(g, sub(v, u_star));
        worst = std::max(worst, val);
    }
    return worst;
}

double strong_monotonicity_estimate(const SystemSpec& sys, int samples, double radius, std::uint64_t seed) {
    if (samples < 2) throw SpecError("strong_monotonicity_estimate: need at least 2 samples");
    Rng rng(seed);
    double inf_ratio = std::numeric_limits<double>::infinity();
    bool any = false;
    for (int k = 0; k < samples; ++k) {
        const Vec u = rng.vec_in_ball(sys.dim(), radius);
        const Vec v = rng.vec_in_ball(sys.dim(), radius);
        const Vec d = sub(u, v);
        const double dn2 = inner(d, d);
        if (dn2 < 1e-24) continue;
        const Vec df = sub(equilibrium_map(sys, u), equilibrium_map(sys, v));
        inf_ratio = std::min(inf_ratio, inner(df, d) / dn2);
        any = true;
    }
    if (!any) throw Error("strong_monotonicity_estimate: degenerate sample");
    return inf_ratio;
}

}  // namespace cocoflow

#pragma once

// Certificate quantities evaluated along trajectories: the Lyapunov values
// Gamma0/Gamma1, anchor distances, operator residuals, the reconstructed
// second-derivative residual, and finite-horizon convergence verdicts.

#include <cstdint>
#include <optional>
#include <vector>

#include "cocoflow/dynamics.hpp"

namespace cocoflow {

struct DiagnosticsSample {
    double t = 0.0;
    double h = 0.0;      // 0.5 |u - p|^2
    double h_dot = 0.0;  // <u - p, u'>
    double gamma0 = 0.0;
    std::optional<double> gamma1;  // present only with a Tikhonov term
    double w = 0.0;                // <grad phi(u) - grad phi(p), u - p>
    double a_residual = 0.0;       // |A(u) - A(p)|
    double d_term = 0.0;           // |u'' + grad phi(u) (+ eps grad Theta(u)) + A(p)|^2
    double eq_residual = 0.0;      // |grad phi(u) + A(u) + eps(t) grad Theta(u)|
};

struct AnchorPoint {
    Vec p;
    double residual = 0.0;  // |grad phi(p) + A(p)| achieved
};

struct ToleranceSet {
    double velocity = 1e-5;       // final |u'|
    double l2_tail = 1e-4;        // integral of |u'|^2 over the last fifth
    double oscillation = 1e-5;    // max positive increment of |u - p|, last half
    double residual = 1e-5;       // |grad phi + A| at the final state
    double gamma0_defect = 1e-8;  // max positive increment of Gamma0 per sample
    double tail_fraction = 0.2;
};

struct ConvergenceReport {
    double final_velocity_norm = 0.0;
    double l2_velocity_tail = 0.0;
    double anchor_oscillation = 0.0;  // monotone-limit defect over the last half
    double gamma0_monotonicity_defect = 0.0;
    double d_term_tail = 0.0;  // trapezoid of d_term over the last fifth
    Vec limit_estimate;
    double limit_residual = 0.0;
    bool i1_limit_in_solution_set = false;
    bool i2_velocity_vanishes = false;
    bool i3_residual_integrable = false;
    bool i4_anchor_distance_settles = false;
    bool pass = false;
    ToleranceSet tolerances;
};

/// Damped fixed-point / Newton solve of grad phi(p) + A(p) = 0 near guess.
AnchorPoint find_equilibrium(const SystemSpec& sys, const Vec& guess, double tol);

/// Gamma0 = h' + gamma h + lambda gamma (|u'|^2 + 2 phi(u) - 2 <u-p, grad phi(p)>).
/// Requires a claimed cocoercivity constant and no Tikhonov term.
double gamma0(const SystemSpec& sys, const AnchorPoint& anchor, const PhaseState& s);

/// Gamma1 = h' + gamma h + lambda gamma (|u'|^2 + 2 (phi(u) - <u-p, grad phi(p)>)
///          + 2 eps(t) (Theta(u) - inf Theta)). Requires the Tikhonov term.
double gamma1(const SystemSpec& sys, const AnchorPoint& anchor, const PhaseState& s);

/// One DiagnosticsSample per trajectory sample; u'' is reconstructed from the
/// vector field, never finite-differenced.
std::vector<DiagnosticsSample> attach_diagnostics(const Trajectory& traj, const SystemSpec& sys,
                                                  const AnchorPoint& anchor);

ConvergenceReport convergence_report(const Trajectory& traj, const std::vector<DiagnosticsSample>& diag,
                                     const SystemSpec& sys, const AnchorPoint& anchor,
                                     const ToleranceSet& tols = {});

/// max over probes v of max(0, -<grad Theta(u_star), v - u_star>); zero means
/// the variational inequality holds on the probe set.
double vi_residual(const PotentialSpec& theta, const std::vector<Vec>& s_probe, const Vec& u_star);

/// Empirical infimum of <F(u)-F(v), u-v>/|u-v|^2 for F = grad phi + A over
/// sampled pairs in the ball.
double strong_monotonicity_estimate(const SystemSpec& sys, int samples, double radius, std::uint64_t seed);

}  // namespace cocoflow

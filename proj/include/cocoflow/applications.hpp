#pragma once

// Packaged problem classes: the gradient-projection dynamic for constrained
// minimization, Tikhonov viscosity selection, and two-player inertial game
// dynamics with the discrete inertial best-response scheme.

#include <optional>
#include <vector>

#include "cocoflow/dynamics.hpp"

namespace cocoflow {

// ---------------------------------------------------------------------------
// Constrained optimization: min g over C via the projection residual
// ---------------------------------------------------------------------------

struct ConstrainedProblem {
    PotentialPtr g;
    ConvexSetPtr c;
    double mu;
    double lipschitz;  // Lipschitz constant of grad g

    /// Validates 0 < mu < 2/L.
    ConstrainedProblem(PotentialPtr g, ConvexSetPtr c, double mu);
};

/// System u'' + gamma u' + u - P_C(u - mu grad g(u)) = 0 with phi = 0 and the
/// projection residual claiming cocoercivity 1/2; refuses gamma <= sqrt(2).
SystemSpec build_gradient_projection_system(const ConstrainedProblem& p, double gamma);

// ---------------------------------------------------------------------------
// Tikhonov viscosity selection
// ---------------------------------------------------------------------------

/// Attaches Theta(x) = 0.5*|x - center|^2 with the given schedule to a system
/// that has no regularization term yet. The schedule must be decreasing
/// (guaranteed by construction for the power/exponential kinds).
SystemSpec build_tikhonov_system(const SystemSpec& base, Vec theta_center, EpsilonSchedule eps);

// ---------------------------------------------------------------------------
// Two-player games
// ---------------------------------------------------------------------------

struct GameSpec {
    PotentialPtr f1;  // player 1 individual payoff
    PotentialPtr f2;  // player 2 individual payoff
    /// joint payoff 0.5*|L1 x1 - L2 x2|^2; both absent means no coupling
    std::optional<Mat> l1;
    std::optional<Mat> l2;
    SaddleSpec saddle;     // zero-sum part
    double lambda_saddle;  // epi-hypo regularization parameter

    GameSpec(PotentialPtr f1, PotentialPtr f2, std::optional<Mat> l1, std::optional<Mat> l2, SaddleSpec saddle,
             double lambda_saddle);

    std::size_t dim1() const { return f1->dim(); }
    std::size_t dim2() const { return f2->dim(); }
    std::size_t dim() const { return dim1() + dim2(); }

    /// f1(x1) + f2(x2) + Phi(x1,x2) assembled on the product space.
    PotentialPtr team_potential() const;
    /// The regularized zero-sum operator driving the dynamics.
    MonotonePtr regularized_saddle_operator() const;
};

/// Product-space system with phi = f1 + f2 + Phi and A the epi-hypo
/// regularized saddle operator; refuses lambda_saddle * gamma^2 <= 1.
SystemSpec build_game_system(const GameSpec& game, double gamma);

/// Norm of the stacked stationarity system, with the zero-sum part evaluated
/// through the regularized operator actually used by the dynamics.
double nash_residual(const GameSpec& game, const Vec& x);

/// Same stack with the raw (unregularized) saddle operator; reported, never
/// asserted against the regularized residual.
double nash_residual_raw(const GameSpec& game, const Vec& x);

struct BestResponseParams {
    double alpha;  // player 1 proximal step
    double nu;     // player 2 proximal step
    double beta;   // inertial extrapolation in [0, 1)
    int iterations;

    BestResponseParams(double alpha, double nu, double beta, int iterations);
};

/// Alternating inertial best response; each subproblem is an exact linear
/// solve, so both payoffs and the zero-sum part must be quadratic. Returns
/// the iterate sequence starting with the two given past iterates.
std::vector<Vec> best_response_discrete(const GameSpec& game, const BestResponseParams& params, const Vec& x_prev,
                                        const Vec& x_curr);

}  // namespace cocoflow

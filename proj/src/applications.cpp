#include "cocoflow/applications.hpp"

#include <cmath>

namespace cocoflow {

// ---------------------------------------------------------------------------
// Constrained optimization
// ---------------------------------------------------------------------------

ConstrainedProblem::ConstrainedProblem(PotentialPtr g_in, ConvexSetPtr c_in, double mu_in)
    : g(std::move(g_in)), c(std::move(c_in)), mu(mu_in), lipschitz(0.0) {
    if (g->dim() != c->dim()) throw SpecError("ConstrainedProblem: objective/set dimensions differ");
    const auto lip = g->grad_lipschitz();
    if (!lip) throw SpecError("ConstrainedProblem: gradient Lipschitz constant unknown for this objective");
    lipschitz = *lip;
    if (!(mu > 0.0) || (lipschitz > 0.0 && !(mu < 2.0 / lipschitz)))
        throw SpecError("ConstrainedProblem: step must satisfy 0 < mu < 2/L (mu=" + fmt17(mu) +
                        ", L=" + fmt17(lipschitz) + ")");
}

SystemSpec build_gradient_projection_system(const ConstrainedProblem& p, double gamma) {
    if (!(gamma > std::sqrt(2.0)))
        throw SpecError("build_gradient_projection_system: needs gamma > sqrt(2) so that lambda*gamma^2 > 1 "
                        "with lambda = 1/2 (gamma=" +
                        fmt17(gamma) + ")");
    auto a = MonotoneSpec::projection_residual(p.g, p.c, p.mu);
    return SystemSpec::make(gamma, PotentialSpec::zero(p.g->dim()), std::move(a));
}

// ---------------------------------------------------------------------------
// Tikhonov selection
// ---------------------------------------------------------------------------

SystemSpec build_tikhonov_system(const SystemSpec& base, Vec theta_center, EpsilonSchedule eps) {
    if (base.tikhonov()) throw SpecError("build_tikhonov_system: base already carries a Tikhonov term");
    if (theta_center.size() != base.dim()) throw SpecError("build_tikhonov_system: center dimension mismatch");
    TikhonovTerm tik{std::move(theta_center), std::move(eps)};
    return SystemSpec::make(base.gamma(), base.phi_ptr(), base.op_ptr(), std::move(tik));
}

// ---------------------------------------------------------------------------
// Games
// ---------------------------------------------------------------------------

GameSpec::GameSpec(PotentialPtr f1_in, PotentialPtr f2_in, std::optional<Mat> l1_in, std::optional<Mat> l2_in,
                   SaddleSpec saddle_in, double lambda_saddle_in)
    : f1(std::move(f1_in)),
      f2(std::move(f2_in)),
      l1(std::move(l1_in)),
      l2(std::move(l2_in)),
      saddle(std::move(saddle_in)),
      lambda_saddle(lambda_saddle_in) {
    if (!(lambda_saddle > 0.0)) throw SpecError("GameSpec: lambda_saddle must be positive");
    if (l1.has_value() != l2.has_value()) throw SpecError("GameSpec: coupling needs both L1 and L2");
    if (saddle.dim1() != f1->dim() || saddle.dim2() != f2->dim())
        throw SpecError("GameSpec: zero-sum block dimensions do not match the players");
    if (l1) {
        if (l1->cols != f1->dim() || l2->cols != f2->dim())
            throw SpecError("GameSpec: coupling operator domain mismatch");
        if (l1->rows != l2->rows) throw SpecError("GameSpec: coupling operators must share their codomain");
    }
}

PotentialPtr GameSpec::team_potential() const {
    const std::size_t n1 = dim1(), n = dim();
    std::vector<PotentialPtr> terms;
    terms.push_back(PotentialSpec::embedded(f1, 0, n));
    terms.push_back(PotentialSpec::embedded(f2, n1, n));
    if (l1) {
        // 0.5*|L1 x1 - L2 x2|^2 = 0.5 <Q x, x> with Q = [L1 -L2]^T [L1 -L2]
        const std::size_t m = l1->rows, n2 = dim2();
        Mat j(m, n);
        for (std::size_t i = 0; i < m; ++i) {
            for (std::size_t k = 0; k < n1; ++k) j.at(i, k) = l1->at(i, k);
            for (std::size_t k = 0; k < n2; ++k) j.at(i, n1 + k) = -l2->at(i, k);
        }
        Mat q = matmul(transpose(j), j);
        terms.push_back(PotentialSpec::quadratic(std::move(q), zeros(n), 0.0));
    }
    return PotentialSpec::sum(std::move(terms));
}

MonotonePtr GameSpec::regularized_saddle_operator() const { return epi_hypo_regularize(saddle, lambda_saddle); }

SystemSpec build_game_system(const GameSpec& game, double gamma) {
    const double product = game.lambda_saddle * gamma * gamma;
    if (!(product > 1.0))
        throw SpecError("build_game_system: lambda_saddle * gamma^2 must exceed 1 (got " + fmt17(product) + ")");
    return SystemSpec::make(gamma, game.team_potential(), game.regularized_saddle_operator());
}

double nash_residual(const GameSpec& game, const Vec& x) {
    if (x.size() != game.dim()) throw DimensionError("nash_residual: dimension mismatch");
    const auto phi = game.team_potential();
    const auto a = game.regularized_saddle_operator();
    return norm(add(phi->gradient(x), a->apply(x)));
}

double nash_residual_raw(const GameSpec& game, const Vec& x) {
    if (x.size() != game.dim()) throw DimensionError("nash_residual_raw: dimension mismatch");
    const auto phi = game.team_potential();
    const auto a = saddle_operator(game.saddle);
    return norm(add(phi->gradient(x), a->apply(x)));
}

// ---------------------------------------------------------------------------
// Discrete inertial best response
// ---------------------------------------------------------------------------

BestResponseParams::BestResponseParams(double alpha_in, double nu_in, double beta_in, int iterations_in)
    : alpha(alpha_in), nu(nu_in), beta(beta_in), iterations(iterations_in) {
    if (!(alpha > 0.0) || !(nu > 0.0)) throw SpecError("BestResponseParams: proximal steps must be positive");
    if (!(beta >= 0.0 && beta < 1.0)) throw SpecError("BestResponseParams: inertia must lie in [0, 1)");
    if (iterations < 0) throw SpecError("BestResponseParams: negative iteration count");
}

namespace {

struct QuadData {
    Mat q;
    Vec c;
};

QuadData quadratic_data(const PotentialPtr& p, const char* who) {
    const auto f = p->quadratic_form();
    if (!f) throw SpecError(std::string(who) + ": best response needs quadratic payoffs");
    return QuadData{f->first, f->second};
}

}  // namespace

std::vector<Vec> best_response_discrete(const GameSpec& game, const BestResponseParams& params, const Vec& x_prev,
                                        const Vec& x_curr) {
    const std::size_t n1 = game.dim1(), n2 = game.dim2(), n = game.dim();
    if (x_prev.size() != n || x_curr.size() != n) throw DimensionError("best_response_discrete: state dimension");

    const QuadData d1 = quadratic_data(game.f1, "best_response_discrete (player 1)");
    const QuadData d2 = quadratic_data(game.f2, "best_response_discrete (player 2)");

    // coupling blocks of Phi: grad_x1 Phi = L1^T (L1 x1 - L2 x2), grad_x2 Phi = -L2^T (L1 x1 - L2 x2)
    Mat l1tl1(n1, n1), l2tl2(n2, n2), l1tl2(n1, n2), l2tl1(n2, n1);
    if (game.l1) {
        l1tl1 = matmul(transpose(*game.l1), *game.l1);
        l2tl2 = matmul(transpose(*game.l2), *game.l2);
        l1tl2 = matmul(transpose(*game.l1), *game.l2);
        l2tl1 = matmul(transpose(*game.l2), *game.l1);
    }

    // player 1 subproblem Hessian: Qf1 + L1^T L1 + Q1 + I/alpha
    Mat h1 = mat_add(d1.q, l1tl1);
    h1 = mat_add(h1, game.saddle.q1);
    for (std::size_t i = 0; i < n1; ++i) h1.at(i, i) += 1.0 / params.alpha;

    // player 2 subproblem Hessian: Qf2 + L2^T L2 + Q2 + I/nu
    Mat h2 = mat_add(d2.q, l2tl2);
    h2 = mat_add(h2, game.saddle.q2);
    for (std::size_t i = 0; i < n2; ++i) h2.at(i, i) += 1.0 / params.nu;

    const Mat rt = transpose(game.saddle.r);

    auto split = [&](const Vec& x) {
        Vec x1(x.begin(), x.begin() + static_cast<std::ptrdiff_t>(n1));
        Vec x2(x.begin() + static_cast<std::ptrdiff_t>(n1), x.end());
        return std::make_pair(std::move(x1), std::move(x2));
    };

    auto [p1, p2] = split(x_prev);
    auto [c1, c2] = split(x_curr);

    std::vector<Vec> iterates;
    iterates.reserve(static_cast<std::size_t>(params.iterations) + 2);
    iterates.push_back(x_prev);
    iterates.push_back(x_curr);

    for (int it = 0; it < params.iterations; ++it) {
        // anchor from inertial extrapolation
        Vec anchor1 = c1;
        for (std::size_t i = 0; i < n1; ++i) anchor1[i] += params.beta * (c1[i] - p1[i]);
        Vec anchor2 = c2;
        for (std::size_t i = 0; i < n2; ++i) anchor2[i] += params.beta * (c2[i] - p2[i]);

        // x1 minimizes f1 + Phi(., x2) + L(., x2) + (1/2a)|. - anchor1|^2:
        // (Qf1 + L1^T L1 + Q1 + I/a) x1 = -cf1 + L1^T L2 x2 - R^T x2 - a_s + anchor1/a
        Vec rhs1 = scale(-1.0, d1.c);
        if (game.l1) axpy(1.0, mul(l1tl2, c2), rhs1);
        axpy(-1.0, mul(rt, c2), rhs1);
        axpy(-1.0, game.saddle.a, rhs1);
        axpy(1.0 / params.alpha, anchor1, rhs1);
        Vec x1_new;
        try {
            x1_new = solve_linear(h1, rhs1, 1e-10);
        } catch (const SingularMatrixError& e) {
            throw IterationError("best_response_discrete: player 1 subproblem singular", e.residual);
        }

        // x2 minimizes f2 + Phi(x1_new, .) - L(x1_new, .) + (1/2v)|. - anchor2|^2:
        // (Qf2 + L2^T L2 + Q2 + I/v) x2 = -cf2 + L2^T L1 x1_new + R x1_new - b_s + anchor2/v
        Vec rhs2 = scale(-1.0, d2.c);
        if (game.l2) axpy(1.0, mul(l2tl1, x1_new), rhs2);
        axpy(1.0, mul(game.saddle.r, x1_new), rhs2);
        axpy(-1.0, game.saddle.b, rhs2);
        axpy(1.0 / params.nu, anchor2, rhs2);
        Vec x2_new;
        try {
            x2_new = solve_linear(h2, rhs2, 1e-10);
        } catch (const SingularMatrixError& e) {
            throw IterationError("best_response_discrete: player 2 subproblem singular", e.residual);
        }

        p1 = c1;
        p2 = c2;
        c1 = std::move(x1_new);
        c2 = std::move(x2_new);

        Vec joined = c1;
        joined.insert(joined.end(), c2.begin(), c2.end());
        iterates.push_back(std::move(joined));
    }
    return iterates;
}

}  // namespace cocoflow

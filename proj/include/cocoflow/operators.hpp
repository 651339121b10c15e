#pragma once

// Catalog of monotone operators: convex potentials with analytic gradients,
// cocoercive maps, contraction residuals, resolvents and Yosida
// approximations, projections onto convex sets, and convex-concave saddle
// operators. Specs are immutable after construction; every operation is pure.

#include <array>
#include <cstdint>
#include <memory>
#include <optional>
#include <variant>
#include <vector>

#include "cocoflow/core.hpp"

namespace cocoflow {

class PotentialSpec;
class MonotoneSpec;
class ContractionSpec;
class ConvexSetSpec;

using PotentialPtr = std::shared_ptr<const PotentialSpec>;
using MonotonePtr = std::shared_ptr<const MonotoneSpec>;
using ContractionPtr = std::shared_ptr<const ContractionSpec>;
using ConvexSetPtr = std::shared_ptr<const ConvexSetSpec>;

// ---------------------------------------------------------------------------
// Convex sets with closed-form Euclidean projections
// ---------------------------------------------------------------------------

class ConvexSetSpec {
public:
    struct Box {
        Vec lo, hi;
    };
    struct Ball {
        Vec center;
        double radius;
    };
    struct Halfspace {   // { x : <normal, x> <= offset }
        Vec normal;
        double offset;
    };
    struct AffineSet {   // { x : A x = rhs }, A full row rank
        Mat a;
        Vec rhs;
    };
    struct WholeSpace {
        std::size_t dim;
    };

    static ConvexSetPtr box(Vec lo, Vec hi);
    static ConvexSetPtr ball(Vec center, double radius);
    static ConvexSetPtr halfspace(Vec normal, double offset);
    static ConvexSetPtr affine(Mat a, Vec rhs);
    static ConvexSetPtr whole_space(std::size_t dim);

    Vec project(const Vec& v) const;
    std::size_t dim() const { return dim_; }
    std::string describe() const;

private:
    using Kind = std::variant<Box, Ball, Halfspace, AffineSet, WholeSpace>;
    explicit ConvexSetSpec(Kind k, std::size_t dim) : kind_(std::move(k)), dim_(dim) {}
    Kind kind_;
    std::size_t dim_;
};

Vec project(const ConvexSetSpec& c, const Vec& v);

// ---------------------------------------------------------------------------
// Convex potentials with exact analytic gradients
// ---------------------------------------------------------------------------

class PotentialSpec {
public:
    /// value = 0.5*<Qx,x> + <c,x> + c0, Q symmetric PSD
    struct Quadratic {
        Mat q;
        Vec c;
        double c0;
    };
    /// value = sum_i w_i |x_i|^p / p, w_i >= 0, p > 1
    struct SeparablePower {
        Vec weights;
        double p;
    };
    struct Sum {
        std::vector<PotentialPtr> terms;
    };
    /// base potential acting on entries [offset, offset+base.dim) of a larger space
    struct Embedded {
        PotentialPtr base;
        std::size_t offset;
        std::size_t total_dim;
    };
    struct Zero {
        std::size_t dim;
    };

    static PotentialPtr quadratic(Mat q, Vec c, double c0 = 0.0);
    /// 0.5*|x|^2
    static PotentialPtr half_sq_norm(std::size_t dim);
    /// 0.5*|x - center|^2 (exact infimum 0 at center)
    static PotentialPtr half_sq_dist(Vec center);
    static PotentialPtr separable_power(Vec weights, double p);
    static PotentialPtr sum(std::vector<PotentialPtr> terms);
    static PotentialPtr embedded(PotentialPtr base, std::size_t offset, std::size_t total_dim);
    static PotentialPtr zero(std::size_t dim);

    double value(const Vec& x) const;
    Vec gradient(const Vec& x) const;
    std::size_t dim() const { return dim_; }

    /// inf over the whole space, when available in closed form
    std::optional<double> infimum() const;
    /// Lipschitz constant of the gradient, when known
    std::optional<double> grad_lipschitz() const;
    /// (Q, c) with gradient(x) = Qx + c, when the potential is quadratic-closed
    std::optional<std::pair<Mat, Vec>> quadratic_form() const;
    bool is_zero() const;
    const std::variant<Quadratic, SeparablePower, Sum, Embedded, Zero>& kind() const { return kind_; }
    std::string describe() const;

private:
    using Kind = std::variant<Quadratic, SeparablePower, Sum, Embedded, Zero>;
    PotentialSpec(Kind k, std::size_t dim) : kind_(std::move(k)), dim_(dim) {}
    Kind kind_;
    std::size_t dim_;
};

Vec grad(const PotentialSpec& p, const Vec& x);

// ---------------------------------------------------------------------------
// Contractions (1-Lipschitz maps)
// ---------------------------------------------------------------------------

class ContractionSpec {
public:
    struct Linear {
        Mat m;  // operator norm <= 1, checked at construction
    };
    /// v -> P_C(v - mu * grad g(v)); a contraction for 0 < mu <= 2/L
    struct ProjGradStep {
        PotentialPtr g;
        ConvexSetPtr c;
        double mu;
    };

    static ContractionPtr linear(Mat m);
    static ContractionPtr proj_grad_step(PotentialPtr g, ConvexSetPtr c, double mu);

    Vec apply(const Vec& x) const;
    std::size_t dim() const { return dim_; }
    double lipschitz_bound() const { return lipschitz_; }
    const std::variant<Linear, ProjGradStep>& kind() const { return kind_; }
    std::string describe() const;

private:
    using Kind = std::variant<Linear, ProjGradStep>;
    ContractionSpec(Kind k, std::size_t dim, double lip) : kind_(std::move(k)), dim_(dim), lipschitz_(lip) {}
    Kind kind_;
    std::size_t dim_;
    double lipschitz_;
};

// ---------------------------------------------------------------------------
// Convex-concave saddle data (quadratic-bilinear class)
//
// L(x1,x2) = 0.5*<Q1 x1, x1> - 0.5*<Q2 x2, x2> + <R x1, x2> + linear terms,
// with the associated operator (grad_x1 L, -grad_x2 L) =
//   (Q1 x1 + R^T x2 + a,  Q2 x2 - R x1 + b).
// ---------------------------------------------------------------------------

struct SaddleSpec {
    Mat q1;  // n1 x n1, symmetric PSD
    Mat q2;  // n2 x n2, symmetric PSD
    Mat r;   // n2 x n1 coupling
    Vec a;   // n1 linear term of the operator's first block
    Vec b;   // n2 linear term of the operator's second block

    SaddleSpec(Mat q1, Mat q2, Mat r, Vec a, Vec b);
    static SaddleSpec bilinear_scalar(double coupling);  // L = coupling * x1 * x2

    std::size_t dim1() const { return q1.rows; }
    std::size_t dim2() const { return q2.rows; }
};

// ---------------------------------------------------------------------------
// Monotone operators
// ---------------------------------------------------------------------------

/// Affine-linear closure A(x) = M x + b of an operator, when it exists.
struct LinearForm {
    Mat m;
    Vec b;
};

class MonotoneSpec {
public:
    struct Linear {
        Mat m;
    };
    struct Gradient {
        PotentialPtr p;
    };
    struct ContractionResidual {  // x - T(x)
        ContractionPtr t;
    };
    struct YosidaOf {  // (I - (I + lambda A)^{-1}) / lambda
        MonotonePtr base;
        double lambda;
        double solve_tol;
    };
    struct ProjectionResidual {  // x - P_C(x - mu * grad g(x))
        PotentialPtr g;
        ConvexSetPtr c;
        double mu;
    };
    struct Saddle {
        std::shared_ptr<const SaddleSpec> l;
    };
    struct Scaled {
        double s;
        MonotonePtr base;
    };
    struct Sum {
        std::vector<MonotonePtr> terms;
    };
    struct Zero {
        std::size_t dim;
    };

    static MonotonePtr linear(Mat m, std::optional<double> cocoercivity = std::nullopt);
    static MonotonePtr gradient(PotentialPtr p);
    static MonotonePtr contraction_residual(ContractionPtr t);
    static MonotonePtr yosida_of(MonotonePtr base, double lambda, double solve_tol = 1e-12);
    static MonotonePtr projection_residual(PotentialPtr g, ConvexSetPtr c, double mu);
    static MonotonePtr saddle(SaddleSpec l);
    static MonotonePtr scaled(double s, MonotonePtr base);
    static MonotonePtr sum(std::vector<MonotonePtr> terms);
    static MonotonePtr zero(std::size_t dim, std::optional<double> claimed_cocoercivity = std::nullopt);

    Vec apply(const Vec& x) const;

    /// x with |x + lambda*A(x) - v| <= tol. Linear-closed kinds use a direct
    /// solve, separable gradients a per-component scalar solve, everything
    /// else the damped fixed-point iteration on the strongly monotone
    /// equation x + lambda*A(x) = v.
    Vec resolvent(double lambda, const Vec& v, double tol) const;

    /// (v - resolvent(lambda, v, tol)) / lambda
    Vec yosida_apply(double lambda, const Vec& v, double tol) const;

    std::size_t dim() const { return dim_; }
    std::optional<double> cocoercivity() const { return cocoercivity_; }
    std::optional<double> lipschitz() const { return lipschitz_; }
    const std::optional<LinearForm>& linear_form() const { return linear_form_; }
    const std::variant<Linear, Gradient, ContractionResidual, YosidaOf, ProjectionResidual, Saddle, Scaled, Sum,
                       Zero>&
    kind() const {
        return kind_;
    }
    std::string describe() const;

private:
    using Kind =
        std::variant<Linear, Gradient, ContractionResidual, YosidaOf, ProjectionResidual, Saddle, Scaled, Sum, Zero>;
    MonotoneSpec(Kind k, std::size_t dim) : kind_(std::move(k)), dim_(dim) {}

    Vec resolvent_iterative(double lambda, const Vec& v, double tol) const;

    Kind kind_;
    std::size_t dim_;
    std::optional<double> cocoercivity_;
    std::optional<double> lipschitz_;
    std::optional<LinearForm> linear_form_;  // precomputed at construction when closed
};

Vec resolvent(const MonotoneSpec& a, double lambda, const Vec& v, double tol);
Vec yosida(const MonotoneSpec& a, double lambda, const Vec& v, double tol);

/// lambda/(lambda+mu) * v + mu/(lambda+mu) * resolvent(A, lambda+mu, v, tol);
/// equals resolvent(yosida_of(A, lambda), mu, v, tol) up to combined tolerance.
Vec resolvent_of_yosida(const MonotoneSpec& a, double lambda, double mu, const Vec& v, double tol);

/// Empirical lower-bound witness for the cocoercivity constant: infimum of
/// <Au-Av, u-v>/|Au-Av|^2 over sampled pairs in the ball of the given radius,
/// skipping pairs with |Au-Av| < 1e-12. Throws if every pair degenerates.
double cocoercivity_estimate(const MonotoneSpec& a, int samples, double radius, std::uint64_t seed);

/// (grad_x1 L, -grad_x2 L) as an affine-linear monotone operator on the
/// product space. Cocoercivity is claimed only in the uncoupled PSD case.
MonotonePtr saddle_operator(const SaddleSpec& l);

/// Yosida approximation of saddle_operator(l); lambda-cocoercive, same zeros.
MonotonePtr epi_hypo_regularize(const SaddleSpec& l, double lambda);

}  // namespace cocoflow

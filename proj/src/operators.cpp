#include "cocoflow/operators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace cocoflow {

namespace {

void check_symmetric_psd(const Mat& q, const char* who) {
    if (!q.square()) throw SpecError(std::string(who) + ": matrix must be square");
    if (!is_symmetric(q, 1e-9)) throw SpecError(std::string(who) + ": matrix must be symmetric");
    const auto ev = symmetric_eigenvalues(q);
    if (!ev.empty() && ev.front() < -1e-9)
        throw SpecError(std::string(who) + ": matrix must be positive semidefinite (min eigenvalue " +
                        fmt17(ev.front()) + ")");
}

std::string mat_str(const Mat& m) {
    return std::to_string(m.rows) + "x" + std::to_string(m.cols) + ":" + fmt_vec(m.a);
}

}  // namespace

// ---------------------------------------------------------------------------
// ConvexSetSpec
// ---------------------------------------------------------------------------

ConvexSetPtr ConvexSetSpec::box(Vec lo, Vec hi) {
    require_same_dim(lo, hi, "ConvexSetSpec::box");
    for (std::size_t i = 0; i < lo.size(); ++i)
        if (lo[i] > hi[i]) throw SpecError("ConvexSetSpec::box: lo > hi at component " + std::to_string(i));
    const std::size_t d = lo.size();
    return ConvexSetPtr(new ConvexSetSpec(Box{std::move(lo), std::move(hi)}, d));
}

ConvexSetPtr ConvexSetSpec::ball(Vec center, double radius) {
    if (!(radius >= 0.0)) throw SpecError("ConvexSetSpec::ball: radius must be >= 0");
    const std::size_t d = center.size();
    return ConvexSetPtr(new ConvexSetSpec(Ball{std::move(center), radius}, d));
}

ConvexSetPtr ConvexSetSpec::halfspace(Vec normal, double offset) {
    if (norm(normal) == 0.0) throw SpecError("ConvexSetSpec::halfspace: zero normal");
    const std::size_t d = normal.size();
    return ConvexSetPtr(new ConvexSetSpec(Halfspace{std::move(normal), offset}, d));
}

ConvexSetPtr ConvexSetSpec::affine(Mat a, Vec rhs) {
    if (a.rows != rhs.size()) throw SpecError("ConvexSetSpec::affine: rhs dimension mismatch");
    if (a.rows > a.cols) throw SpecError("ConvexSetSpec::affine: more equations than unknowns");
    // verify A A^T invertible (full row rank)
    const Mat aat = matmul(a, transpose(a));
    solve_linear(aat, Vec(a.rows, 1.0), 1e-8);
    const std::size_t d = a.cols;
    return ConvexSetPtr(new ConvexSetSpec(AffineSet{std::move(a), std::move(rhs)}, d));
}

ConvexSetPtr ConvexSetSpec::whole_space(std::size_t dim) {
    return ConvexSetPtr(new ConvexSetSpec(WholeSpace{dim}, dim));
}

Vec ConvexSetSpec::project(const Vec& v) const {
    if (v.size() != dim_) throw DimensionError("ConvexSetSpec::project: dimension mismatch");
    struct Visitor {
        const Vec& v;
        Vec operator()(const Box& b) const {
            Vec r = v;
            for (std::size_t i = 0; i < r.size(); ++i) r[i] = std::min(std::max(r[i], b.lo[i]), b.hi[i]);
            return r;
        }
        Vec operator()(const Ball& b) const {
            Vec d = sub(v, b.center);
            const double n = norm(d);
            if (n <= b.radius) return v;
            return add(b.center, scale(b.radius / n, d));
        }
        Vec operator()(const Halfspace& h) const {
            const double s = inner(h.normal, v) - h.offset;
            if (s <= 0.0) return v;
            return sub(v, scale(s / inner(h.normal, h.normal), h.normal));
        }
        Vec operator()(const AffineSet& s) const {
            const Vec resid = sub(mul(s.a, v), s.rhs);
            const Mat aat = matmul(s.a, transpose(s.a));
            const Vec y = solve_linear(aat, resid, 1e-12);
            return sub(v, mul(transpose(s.a), y));
        }
        Vec operator()(const WholeSpace&) const { return v; }
    };
    return std::visit(Visitor{v}, kind_);
}

std::string ConvexSetSpec::describe() const {
    struct Visitor {
        std::string operator()(const Box& b) const { return "box(" + fmt_vec(b.lo) + ";" + fmt_vec(b.hi) + ")"; }
        std::string operator()(const Ball& b) const {
            return "ball(" + fmt_vec(b.center) + ";" + fmt17(b.radius) + ")";
        }
        std::string operator()(const Halfspace& h) const {
            return "halfspace(" + fmt_vec(h.normal) + ";" + fmt17(h.offset) + ")";
        }
        std::string operator()(const AffineSet& s) const { return "affine(" + mat_str(s.a) + ";" + fmt_vec(s.rhs) + ")"; }
        std::string operator()(const WholeSpace& w) const { return "wholespace(" + std::to_string(w.dim) + ")"; }
    };
    return std::visit(Visitor{}, kind_);
}

Vec project(const ConvexSetSpec& c, const Vec& v) { return c.project(v); }

// ---------------------------------------------------------------------------
// PotentialSpec
// ---------------------------------------------------------------------------

PotentialPtr PotentialSpec::quadratic(Mat q, Vec c, double c0) {
    check_symmetric_psd(q, "PotentialSpec::quadratic");
    if (q.rows != c.size()) throw SpecError("PotentialSpec::quadratic: linear term dimension mismatch");
    const std::size_t d = c.size();
    return PotentialPtr(new PotentialSpec(Quadratic{std::move(q), std::move(c), c0}, d));
}

PotentialPtr PotentialSpec::half_sq_norm(std::size_t dim) {
    return quadratic(Mat::identity(dim), zeros(dim), 0.0);
}

PotentialPtr PotentialSpec::half_sq_dist(Vec center) {
    const std::size_t d = center.size();
    const double c0 = 0.5 * inner(center, center);
    return quadratic(Mat::identity(d), scale(-1.0, center), c0);
}

PotentialPtr PotentialSpec::separable_power(Vec weights, double p) {
    if (!(p >= 2.0)) throw SpecError("PotentialSpec::separable_power: exponent must be >= 2");
    for (double w : weights)
        if (w < 0.0) throw SpecError("PotentialSpec::separable_power: weights must be nonnegative");
    const std::size_t d = weights.size();
    return PotentialPtr(new PotentialSpec(SeparablePower{std::move(weights), p}, d));
}

PotentialPtr PotentialSpec::sum(std::vector<PotentialPtr> terms) {
    if (terms.empty()) throw SpecError("PotentialSpec::sum: empty term list");
    const std::size_t d = terms.front()->dim();
    for (const auto& t : terms)
        if (t->dim() != d) throw SpecError("PotentialSpec::sum: term dimensions differ");
    return PotentialPtr(new PotentialSpec(Sum{std::move(terms)}, d));
}

PotentialPtr PotentialSpec::embedded(PotentialPtr base, std::size_t offset, std::size_t total_dim) {
    if (offset + base->dim() > total_dim) throw SpecError("PotentialSpec::embedded: slice exceeds total dimension");
    return PotentialPtr(new PotentialSpec(Embedded{std::move(base), offset, total_dim}, total_dim));
}

PotentialPtr PotentialSpec::zero(std::size_t dim) { return PotentialPtr(new PotentialSpec(Zero{dim}, dim)); }

double PotentialSpec::value(const Vec& x) const {
    if (x.size() != dim_) throw DimensionError("PotentialSpec::value: dimension mismatch");
    struct Visitor {
        const Vec& x;
        double operator()(const Quadratic& q) const { return 0.5 * inner(x, mul(q.q, x)) + inner(q.c, x) + q.c0; }
        double operator()(const SeparablePower& s) const {
            double v = 0.0;
            for (std::size_t i = 0; i < x.size(); ++i) v += s.weights[i] * std::pow(std::abs(x[i]), s.p) / s.p;
            return v;
        }
        double operator()(const Sum& s) const {
            double v = 0.0;
            for (const auto& t : s.terms) v += t->value(x);
            return v;
        }
        double operator()(const Embedded& e) const {
            Vec slice(x.begin() + static_cast<std::ptrdiff_t>(e.offset),
                      x.begin() + static_cast<std::ptrdiff_t>(e.offset + e.base->dim()));
            return e.base->value(slice);
        }
        double operator()(const Zero&) const { return 0.0; }
    };
    return std::visit(Visitor{x}, kind_);
}

Vec PotentialSpec::gradient(const Vec& x) const {
    if (x.size() != dim_) throw DimensionError("PotentialSpec::gradient: dimension mismatch");
    struct Visitor {
        const Vec& x;
        Vec operator()(const Quadratic& q) const { return add(mul(q.q, x), q.c); }
        Vec operator()(const SeparablePower& s) const {
            Vec g(x.size(), 0.0);
            for (std::size_t i = 0; i < x.size(); ++i) {
                if (x[i] == 0.0) continue;
                g[i] = s.weights[i] * std::pow(std::abs(x[i]), s.p - 2.0) * x[i];
            }
            return g;
        }
        Vec operator()(const Sum& s) const {
            Vec g = s.terms.front()->gradient(x);
            for (std::size_t k = 1; k < s.terms.size(); ++k) {
                const Vec gk = s.terms[k]->gradient(x);
                for (std::size_t i = 0; i < g.size(); ++i) g[i] += gk[i];
            }
            return g;
        }
        Vec operator()(const Embedded& e) const {
            Vec slice(x.begin() + static_cast<std::ptrdiff_t>(e.offset),
                      x.begin() + static_cast<std::ptrdiff_t>(e.offset + e.base->dim()));
            const Vec gs = e.base->gradient(slice);
            Vec g(e.total_dim, 0.0);
            for (std::size_t i = 0; i < gs.size(); ++i) g[e.offset + i] = gs[i];
            return g;
        }
        Vec operator()(const Zero& z) const { return zeros(z.dim); }
    };
    return std::visit(Visitor{x}, kind_);
}

std::optional<double> PotentialSpec::infimum() const {
    struct Visitor {
        std::optional<double> operator()(const Quadratic& q) const {
            if (norm(q.c) == 0.0) return q.c0;  // minimizer at the origin even if Q is singular
            try {
                const Vec xstar = solve_linear(q.q, scale(-1.0, q.c), 1e-9);
                return 0.5 * inner(xstar, mul(q.q, xstar)) + inner(q.c, xstar) + q.c0;
            } catch (const SingularMatrixError&) {
                return std::nullopt;
            }
        }
        std::optional<double> operator()(const SeparablePower&) const { return 0.0; }
        std::optional<double> operator()(const Sum&) const { return std::nullopt; }
        std::optional<double> operator()(const Embedded& e) const { return e.base->infimum(); }
        std::optional<double> operator()(const Zero&) const { return 0.0; }
    };
    return std::visit(Visitor{}, kind_);
}

std::optional<double> PotentialSpec::grad_lipschitz() const {
    struct Visitor {
        std::optional<double> operator()(const Quadratic& q) const {
            return q.q.rows == 0 ? 0.0 : symmetric_max_eigenvalue(q.q);
        }
        std::optional<double> operator()(const SeparablePower& s) const {
            if (s.p == 2.0) return s.weights.empty() ? 0.0 : *std::max_element(s.weights.begin(), s.weights.end());
            return std::nullopt;
        }
        std::optional<double> operator()(const Sum& s) const {
            double total = 0.0;
            for (const auto& t : s.terms) {
                const auto l = t->grad_lipschitz();
                if (!l) return std::nullopt;
                total += *l;
            }
            return total;
        }
        std::optional<double> operator()(const Embedded& e) const { return e.base->grad_lipschitz(); }
        std::optional<double> operator()(const Zero&) const { return 0.0; }
    };
    return std::visit(Visitor{}, kind_);
}

std::optional<std::pair<Mat, Vec>> PotentialSpec::quadratic_form() const {
    struct Visitor {
        std::size_t dim;
        std::optional<std::pair<Mat, Vec>> operator()(const Quadratic& q) const {
            return std::make_pair(q.q, q.c);
        }
        std::optional<std::pair<Mat, Vec>> operator()(const SeparablePower& s) const {
            if (s.p != 2.0) return std::nullopt;
            Mat q(dim, dim);
            for (std::size_t i = 0; i < dim; ++i) q.at(i, i) = s.weights[i];
            return std::make_pair(std::move(q), zeros(dim));
        }
        std::optional<std::pair<Mat, Vec>> operator()(const Sum& s) const {
            Mat q(dim, dim);
            Vec c = zeros(dim);
            for (const auto& t : s.terms) {
                const auto f = t->quadratic_form();
                if (!f) return std::nullopt;
                q = mat_add(q, f->first);
                c = add(c, f->second);
            }
            return std::make_pair(std::move(q), std::move(c));
        }
        std::optional<std::pair<Mat, Vec>> operator()(const Embedded& e) const {
            const auto f = e.base->quadratic_form();
            if (!f) return std::nullopt;
            Mat q(dim, dim);
            Vec c = zeros(dim);
            const std::size_t d = e.base->dim();
            for (std::size_t i = 0; i < d; ++i) {
                c[e.offset + i] = f->second[i];
                for (std::size_t j = 0; j < d; ++j) q.at(e.offset + i, e.offset + j) = f->first.at(i, j);
            }
            return std::make_pair(std::move(q), std::move(c));
        }
        std::optional<std::pair<Mat, Vec>> operator()(const Zero&) const {
            return std::make_pair(Mat::zero(dim, dim), zeros(dim));
        }
    };
    return std::visit(Visitor{dim_}, kind_);
}

bool PotentialSpec::is_zero() const { return std::holds_alternative<Zero>(kind_); }

std::string PotentialSpec::describe() const {
    struct Visitor {
        std::string operator()(const Quadratic& q) const {
            return "quad(" + mat_str(q.q) + ";" + fmt_vec(q.c) + ";" + fmt17(q.c0) + ")";
        }
        std::string operator()(const SeparablePower& s) const {
            return "seppow(" + fmt_vec(s.weights) + ";" + fmt17(s.p) + ")";
        }
        std::string operator()(const Sum& s) const {
            std::string r = "sum(";
            for (const auto& t : s.terms) r += t->describe() + ";";
            return r + ")";
        }
        std::string operator()(const Embedded& e) const {
            return "embed(" + e.base->describe() + ";" + std::to_string(e.offset) + ";" +
                   std::to_string(e.total_dim) + ")";
        }
        std::string operator()(const Zero& z) const { return "zeropot(" + std::to_string(z.dim) + ")"; }
    };
    return std::visit(Visitor{}, kind_);
}

Vec grad(const PotentialSpec& p, const Vec& x) { return p.gradient(x); }

// ---------------------------------------------------------------------------
// ContractionSpec
// ---------------------------------------------------------------------------

ContractionPtr ContractionSpec::linear(Mat m) {
    if (!m.square()) throw SpecError("ContractionSpec::linear: matrix must be square");
    const double n = operator_norm(m);
    if (n > 1.0 + 1e-9) throw SpecError("ContractionSpec::linear: operator norm " + fmt17(n) + " exceeds 1");
    const std::size_t d = m.rows;
    return ContractionPtr(new ContractionSpec(Linear{std::move(m)}, d, std::min(n, 1.0)));
}

ContractionPtr ContractionSpec::proj_grad_step(PotentialPtr g, ConvexSetPtr c, double mu) {
    if (g->dim() != c->dim()) throw SpecError("ContractionSpec::proj_grad_step: dimensions differ");
    const auto lip = g->grad_lipschitz();
    if (!lip) throw SpecError("ContractionSpec::proj_grad_step: gradient Lipschitz constant unknown");
    if (!(mu > 0.0) || (*lip > 0.0 && mu > 2.0 / *lip))
        throw SpecError("ContractionSpec::proj_grad_step: step must satisfy 0 < mu <= 2/L");
    const std::size_t d = g->dim();
    return ContractionPtr(new ContractionSpec(ProjGradStep{std::move(g), std::move(c), mu}, d, 1.0));
}

Vec ContractionSpec::apply(const Vec& x) const {
    if (x.size() != dim_) throw DimensionError("ContractionSpec::apply: dimension mismatch");
    struct Visitor {
        const Vec& x;
        Vec operator()(const Linear& l) const { return mul(l.m, x); }
        Vec operator()(const ProjGradStep& p) const {
            const Vec step = sub(x, scale(p.mu, p.g->gradient(x)));
            return p.c->project(step);
        }
    };
    return std::visit(Visitor{x}, kind_);
}

std::string ContractionSpec::describe() const {
    struct Visitor {
        std::string operator()(const Linear& l) const { return "contr_lin(" + mat_str(l.m) + ")"; }
        std::string operator()(const ProjGradStep& p) const {
            return "contr_pg(" + p.g->describe() + ";" + p.c->describe() + ";" + fmt17(p.mu) + ")";
        }
    };
    return std::visit(Visitor{}, kind_);
}

// ---------------------------------------------------------------------------
// SaddleSpec
// ---------------------------------------------------------------------------

SaddleSpec::SaddleSpec(Mat q1_in, Mat q2_in, Mat r_in, Vec a_in, Vec b_in)
    : q1(std::move(q1_in)), q2(std::move(q2_in)), r(std::move(r_in)), a(std::move(a_in)), b(std::move(b_in)) {
    check_symmetric_psd(q1, "SaddleSpec (convex block)");
    check_symmetric_psd(q2, "SaddleSpec (concave block)");
    if (r.rows != q2.rows || r.cols != q1.rows) throw SpecError("SaddleSpec: coupling matrix shape mismatch");
    if (a.size() != q1.rows || b.size() != q2.rows) throw SpecError("SaddleSpec: linear term dimension mismatch");
}

SaddleSpec SaddleSpec::bilinear_scalar(double coupling) {
    return SaddleSpec(Mat(1, 1), Mat(1, 1), Mat(1, 1, {coupling}), Vec{0.0}, Vec{0.0});
}

// ---------------------------------------------------------------------------
// MonotoneSpec
// ---------------------------------------------------------------------------

namespace {

Mat assemble_saddle_matrix(const SaddleSpec& l) {
    const std::size_t n1 = l.dim1(), n2 = l.dim2();
    Mat m(n1 + n2, n1 + n2);
    for (std::size_t i = 0; i < n1; ++i)
        for (std::size_t j = 0; j < n1; ++j) m.at(i, j) = l.q1.at(i, j);
    for (std::size_t i = 0; i < n2; ++i)
        for (std::size_t j = 0; j < n2; ++j) m.at(n1 + i, n1 + j) = l.q2.at(i, j);
    for (std::size_t i = 0; i < n2; ++i)
        for (std::size_t j = 0; j < n1; ++j) {
            m.at(j, n1 + i) = l.r.at(i, j);   // R^T block
            m.at(n1 + i, j) = -l.r.at(i, j);  // -R block
        }
    return m;
}

Vec assemble_saddle_offset(const SaddleSpec& l) {
    Vec v = l.a;
    v.insert(v.end(), l.b.begin(), l.b.end());
    return v;
}

}  // namespace

MonotonePtr MonotoneSpec::linear(Mat m, std::optional<double> cocoercivity) {
    if (!m.square()) throw SpecError("MonotoneSpec::linear: matrix must be square");
    const std::size_t d = m.rows;
    auto spec = std::shared_ptr<MonotoneSpec>(new MonotoneSpec(Linear{m}, d));
    spec->lipschitz_ = operator_norm(m);
    if (cocoercivity) {
        spec->cocoercivity_ = cocoercivity;
    } else if (is_symmetric(m, 1e-12)) {
        const auto ev = symmetric_eigenvalues(m);
        if (!ev.empty() && ev.front() >= -1e-12 && ev.back() > 0.0) spec->cocoercivity_ = 1.0 / ev.back();
    }
    spec->linear_form_ = LinearForm{std::move(m), zeros(d)};
    return spec;
}

MonotonePtr MonotoneSpec::gradient(PotentialPtr p) {
    const std::size_t d = p->dim();
    auto spec = std::shared_ptr<MonotoneSpec>(new MonotoneSpec(Gradient{p}, d));
    spec->lipschitz_ = p->grad_lipschitz();
    if (spec->lipschitz_ && *spec->lipschitz_ > 0.0) spec->cocoercivity_ = 1.0 / *spec->lipschitz_;
    if (auto f = p->quadratic_form()) spec->linear_form_ = LinearForm{std::move(f->first), std::move(f->second)};
    return spec;
}

MonotonePtr MonotoneSpec::contraction_residual(ContractionPtr t) {
    const std::size_t d = t->dim();
    auto spec = std::shared_ptr<MonotoneSpec>(new MonotoneSpec(ContractionResidual{t}, d));
    spec->cocoercivity_ = 0.5;
    spec->lipschitz_ = 1.0 + t->lipschitz_bound();
    if (const auto* lin = std::get_if<ContractionSpec::Linear>(&t->kind())) {
        Mat m = mat_add(Mat::identity(d), mat_scale(-1.0, lin->m));
        spec->linear_form_ = LinearForm{std::move(m), zeros(d)};
    }
    return spec;
}

MonotonePtr MonotoneSpec::yosida_of(MonotonePtr base, double lambda, double solve_tol) {
    if (!(lambda > 0.0)) throw SpecError("MonotoneSpec::yosida_of: lambda must be positive");
    const std::size_t d = base->dim();
    auto spec = std::shared_ptr<MonotoneSpec>(new MonotoneSpec(YosidaOf{base, lambda, solve_tol}, d));
    spec->cocoercivity_ = lambda;
    spec->lipschitz_ = 1.0 / lambda;
    if (base->linear_form_) {
        // A_lambda(x) = ((I - P)/lambda) x + P b, with P = (I + lambda M)^{-1}
        const Mat& m = base->linear_form_->m;
        const Vec& b = base->linear_form_->b;
        const Mat iplm = mat_add(Mat::identity(d), mat_scale(lambda, m));
        Mat p(d, d);
        for (std::size_t j = 0; j < d; ++j) {
            Vec e = zeros(d);
            e[j] = 1.0;
            const Vec col = solve_linear(iplm, e, 1e-10);
            for (std::size_t i = 0; i < d; ++i) p.at(i, j) = col[i];
        }
        Mat my(d, d);
        for (std::size_t i = 0; i < d; ++i)
            for (std::size_t j = 0; j < d; ++j)
                my.at(i, j) = ((i == j ? 1.0 : 0.0) - p.at(i, j)) / lambda;
        spec->linear_form_ = LinearForm{std::move(my), mul(p, b)};
    }
    return spec;
}

MonotonePtr MonotoneSpec::projection_residual(PotentialPtr g, ConvexSetPtr c, double mu) {
    if (g->dim() != c->dim()) throw SpecError("MonotoneSpec::projection_residual: dimensions differ");
    const auto lip = g->grad_lipschitz();
    if (!lip) throw SpecError("MonotoneSpec::projection_residual: gradient Lipschitz constant unknown");
    if (!(mu > 0.0) || (*lip > 0.0 && !(mu < 2.0 / *lip)))
        throw SpecError("MonotoneSpec::projection_residual: step must satisfy 0 < mu < 2/L (mu=" + fmt17(mu) +
                        ", L=" + fmt17(*lip) + ")");
    const std::size_t d = g->dim();
    auto spec = std::shared_ptr<MonotoneSpec>(new MonotoneSpec(ProjectionResidual{std::move(g), std::move(c), mu}, d));
    spec->cocoercivity_ = 0.5;
    spec->lipschitz_ = 2.0;
    return spec;
}

MonotonePtr MonotoneSpec::saddle(SaddleSpec l) {
    const std::size_t d = l.dim1() + l.dim2();
    auto shared = std::make_shared<const SaddleSpec>(std::move(l));
    auto spec = std::shared_ptr<MonotoneSpec>(new MonotoneSpec(Saddle{shared}, d));
    Mat m = assemble_saddle_matrix(*shared);
    spec->lipschitz_ = operator_norm(m);
    if (frobenius_norm(shared->r) == 0.0) {
        const auto ev = symmetric_eigenvalues(m);
        if (ev.back() > 0.0) spec->cocoercivity_ = 1.0 / ev.back();
    }
    spec->linear_form_ = LinearForm{std::move(m), assemble_saddle_offset(*shared)};
    return spec;
}

MonotonePtr MonotoneSpec::scaled(double s, MonotonePtr base) {
    if (!(s > 0.0)) throw SpecError("MonotoneSpec::scaled: factor must be positive");
    const std::size_t d = base->dim();
    auto spec = std::shared_ptr<MonotoneSpec>(new MonotoneSpec(Scaled{s, base}, d));
    if (base->cocoercivity_) spec->cocoercivity_ = *base->cocoercivity_ / s;
    if (base->lipschitz_) spec->lipschitz_ = s * *base->lipschitz_;
    if (base->linear_form_)
        spec->linear_form_ = LinearForm{mat_scale(s, base->linear_form_->m), scale(s, base->linear_form_->b)};
    return spec;
}

MonotonePtr MonotoneSpec::sum(std::vector<MonotonePtr> terms) {
    if (terms.empty()) throw SpecError("MonotoneSpec::sum: empty term list");
    const std::size_t d = terms.front()->dim();
    for (const auto& t : terms)
        if (t->dim() != d) throw SpecError("MonotoneSpec::sum: term dimensions differ");
    auto spec = std::shared_ptr<MonotoneSpec>(new MonotoneSpec(Sum{terms}, d));
    bool all_coco = true, all_lip = true, all_form = true;
    double min_coco = std::numeric_limits<double>::infinity();
    double lip = 0.0;
    for (const auto& t : terms) {
        if (t->cocoercivity_)
            min_coco = std::min(min_coco, *t->cocoercivity_);
        else
            all_coco = false;
        if (t->lipschitz_)
            lip += *t->lipschitz_;
        else
            all_lip = false;
        if (!t->linear_form_) all_form = false;
    }
    if (all_coco) spec->cocoercivity_ = min_coco / static_cast<double>(terms.size());
    if (all_lip) spec->lipschitz_ = lip;
    if (all_form) {
        Mat m(d, d);
        Vec b = zeros(d);
        for (const auto& t : terms) {
            m = mat_add(m, t->linear_form_->m);
            b = add(b, t->linear_form_->b);
        }
        spec->linear_form_ = LinearForm{std::move(m), std::move(b)};
    }
    return spec;
}

MonotonePtr MonotoneSpec::zero(std::size_t dim, std::optional<double> claimed_cocoercivity) {
    auto spec = std::shared_ptr<MonotoneSpec>(new MonotoneSpec(Zero{dim}, dim));
    spec->cocoercivity_ = claimed_cocoercivity;
    spec->lipschitz_ = 0.0;
    spec->linear_form_ = LinearForm{Mat::zero(dim, dim), zeros(dim)};
    return spec;
}

Vec MonotoneSpec::apply(const Vec& x) const {
    if (x.size() != dim_) throw DimensionError("MonotoneSpec::apply: dimension mismatch");
    if (linear_form_) return add(mul(linear_form_->m, x), linear_form_->b);
    struct Visitor {
        const MonotoneSpec& self;
        const Vec& x;
        Vec operator()(const Linear& l) const { return mul(l.m, x); }
        Vec operator()(const Gradient& g) const { return g.p->gradient(x); }
        Vec operator()(const ContractionResidual& c) const { return sub(x, c.t->apply(x)); }
        Vec operator()(const YosidaOf& y) const { return y.base->yosida_apply(y.lambda, x, y.solve_tol); }
        Vec operator()(const ProjectionResidual& p) const {
            const Vec step = sub(x, scale(p.mu, p.g->gradient(x)));
            return sub(x, p.c->project(step));
        }
        Vec operator()(const Saddle&) const { throw Error("saddle operator missing linear form"); }
        Vec operator()(const Scaled& s) const { return scale(s.s, s.base->apply(x)); }
        Vec operator()(const Sum& s) const {
            Vec r = s.terms.front()->apply(x);
            for (std::size_t k = 1; k < s.terms.size(); ++k) {
                const Vec rk = s.terms[k]->apply(x);
                for (std::size_t i = 0; i < r.size(); ++i) r[i] += rk[i];
            }
            return r;
        }
        Vec operator()(const Zero& z) const { return zeros(z.dim); }
    };
    return std::visit(Visitor{*this, x}, kind_);
}

namespace {

/// Scalar solve of m + lambda*w*m^(p-1) = target for m >= 0 (monotone increasing).
double solve_power_scalar(double lambda_w, double p, double target) {
    if (target <= 0.0) return 0.0;
    double lo = 0.0, hi = target;  // root lies in [0, target]
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double f = mid + lambda_w * std::pow(mid, p - 1.0) - target;
        if (f > 0.0)
            hi = mid;
        else
            lo = mid;
    }
    double m = 0.5 * (lo + hi);
    for (int it = 0; it < 4; ++it) {  // Newton polish
        const double f = m + lambda_w * std::pow(m, p - 1.0) - target;
        const double df = 1.0 + lambda_w * (p - 1.0) * std::pow(m, p - 2.0);
        const double step = f / df;
        if (!std::isfinite(step)) break;
        m -= step;
        if (m < 0.0) m = 0.0;
    }
    return m;
}

}  // namespace

Vec MonotoneSpec::resolvent(double lambda, const Vec& v, double tol) const {
    if (!(lambda > 0.0)) throw SpecError("resolvent: lambda must be positive");
    if (v.size() != dim_) throw DimensionError("resolvent: dimension mismatch");

    Vec x;
    if (linear_form_) {
        // (I + lambda M) x = v - lambda b
        const std::size_t d = dim_;
        Mat iplm = mat_scale(lambda, linear_form_->m);
        for (std::size_t i = 0; i < d; ++i) iplm.at(i, i) += 1.0;
        Vec rhs = v;
        axpy(-lambda, linear_form_->b, rhs);
        x = solve_linear(iplm, rhs, 1e-12);
    } else if (const auto* g = std::get_if<Gradient>(&kind_)) {
        if (const auto* sp = std::get_if<PotentialSpec::SeparablePower>(&g->p->kind())) {
            x = Vec(dim_, 0.0);
            for (std::size_t i = 0; i < dim_; ++i) {
                const double m = solve_power_scalar(lambda * sp->weights[i], sp->p, std::abs(v[i]));
                x[i] = v[i] >= 0.0 ? m : -m;
            }
        } else {
            x = resolvent_iterative(lambda, v, tol);
        }
    } else {
        x = resolvent_iterative(lambda, v, tol);
    }

    // defining relation |x + lambda A(x) - v| <= tol, always enforced
    Vec resid = add(x, scale(lambda, apply(x)));
    axpy(-1.0, v, resid);
    const double r = norm(resid);
    if (!(r <= tol)) {
        // one step of iterative refinement for the direct path, then re-check
        if (linear_form_) {
            Mat iplm = mat_scale(lambda, linear_form_->m);
            for (std::size_t i = 0; i < dim_; ++i) iplm.at(i, i) += 1.0;
            const Vec corr = solve_linear(iplm, resid, 1e-12);
            x = sub(x, corr);
            Vec resid2 = add(x, scale(lambda, apply(x)));
            axpy(-1.0, v, resid2);
            if (norm(resid2) <= tol) return x;
        }
        throw IterationError("resolvent: defining relation not met (residual " + fmt17(r) + ")", r);
    }
    return x;
}

Vec MonotoneSpec::resolvent_iterative(double lambda, const Vec& v, double tol) const {
    double lip;
    if (cocoercivity_)
        lip = 1.0 / *cocoercivity_;
    else if (lipschitz_)
        lip = *lipschitz_;
    else
        throw SpecError("resolvent: no Lipschitz bound available for iterative solve");

    const double tau = 1.0 / ((1.0 + lambda * lip) * (1.0 + lambda * lip));
    Vec x = v;
    double best = std::numeric_limits<double>::infinity();
    constexpr int kMaxIter = 10000;
    for (int it = 0; it < kMaxIter; ++it) {
        Vec resid = add(x, scale(lambda, apply(x)));
        axpy(-1.0, v, resid);
        const double r = norm(resid);
        if (r < best) best = r;
        if (r <= tol) return x;
        axpy(-tau, resid, x);
    }
    throw IterationError("resolvent: fixed-point iteration exhausted (best residual " + fmt17(best) + ")", best);
}

Vec MonotoneSpec::yosida_apply(double lambda, const Vec& v, double tol) const {
    const Vec j = resolvent(lambda, v, tol);
    return scale(1.0 / lambda, sub(v, j));
}

std::string MonotoneSpec::describe() const {
    struct Visitor {
        const MonotoneSpec& self;
        std::string operator()(const Linear& l) const { return "lin(" + mat_str(l.m) + ")"; }
        std::string operator()(const Gradient& g) const { return "gradop(" + g.p->describe() + ")"; }
        std::string operator()(const ContractionResidual& c) const { return "ires(" + c.t->describe() + ")"; }
        std::string operator()(const YosidaOf& y) const {
            return "yosida(" + y.base->describe() + ";" + fmt17(y.lambda) + ")";
        }
        std::string operator()(const ProjectionResidual& p) const {
            return "projres(" + p.g->describe() + ";" + p.c->describe() + ";" + fmt17(p.mu) + ")";
        }
        std::string operator()(const Saddle& s) const {
            return "saddleop(" + mat_str(s.l->q1) + ";" + mat_str(s.l->q2) + ";" + mat_str(s.l->r) + ";" +
                   fmt_vec(s.l->a) + ";" + fmt_vec(s.l->b) + ")";
        }
        std::string operator()(const Scaled& s) const { return "scaled(" + fmt17(s.s) + ";" + s.base->describe() + ")"; }
        std::string operator()(const Sum& s) const {
            std::string r = "opsum(";
            for (const auto& t : s.terms) r += t->describe() + ";";
            return r + ")";
        }
        std::string operator()(const Zero& z) const { return "zeroop(" + std::to_string(z.dim) + ")"; }
    };
    std::string s = std::visit(Visitor{*this}, kind_);
    if (cocoercivity_) s += "[coco=" + fmt17(*cocoercivity_) + "]";
    return s;
}

Vec resolvent(const MonotoneSpec& a, double lambda, const Vec& v, double tol) { return a.resolvent(lambda, v, tol); }
Vec yosida(const MonotoneSpec& a, double lambda, const Vec& v, double tol) { return a.yosida_apply(lambda, v, tol); }

Vec resolvent_of_yosida(const MonotoneSpec& a, double lambda, double mu, const Vec& v, double tol) {
    if (!(lambda > 0.0) || !(mu > 0.0)) throw SpecError("resolvent_of_yosida: parameters must be positive");
    const Vec j = a.resolvent(lambda + mu, v, tol);
    Vec r = scale(lambda / (lambda + mu), v);
    axpy(mu / (lambda + mu), j, r);
    return r;
}

double cocoercivity_estimate(const MonotoneSpec& a, int samples, double radius, std::uint64_t seed) {
    if (samples < 2) throw SpecError("cocoercivity_estimate: need at least 2 samples");
    Rng rng(seed);
    double inf_ratio = std::numeric_limits<double>::infinity();
    bool any = false;
    for (int k = 0; k < samples; ++k) {
        const Vec u = rng.vec_in_ball(a.dim(), radius);
        const Vec v = rng.vec_in_ball(a.dim(), radius);
        const Vec du = sub(a.apply(u), a.apply(v));
        const double dn = norm(du);
        if (dn < 1e-12) continue;
        const double ratio = inner(du, sub(u, v)) / (dn * dn);
        inf_ratio = std::min(inf_ratio, ratio);
        any = true;
    }
    if (!any) throw Error("cocoercivity_estimate: operator constant on sample");
    return inf_ratio;
}

MonotonePtr saddle_operator(const SaddleSpec& l) { return MonotoneSpec::saddle(l); }

MonotonePtr epi_hypo_regularize(const SaddleSpec& l, double lambda) {
    if (!(lambda > 0.0)) throw SpecError("epi_hypo_regularize: lambda must be positive");
    return MonotoneSpec::yosida_of(saddle_operator(l), lambda);
}

}  // namespace cocoflow

#include "cocoflow/dynamics.hpp"

#include <cmath>

namespace cocoflow {

// ---------------------------------------------------------------------------
// EpsilonSchedule
// ---------------------------------------------------------------------------

EpsilonSchedule EpsilonSchedule::zero() { return EpsilonSchedule(Zero{}); }

EpsilonSchedule EpsilonSchedule::power(double c, double p) {
    if (!(c > 0.0) || !(p > 0.0)) throw SpecError("EpsilonSchedule::power: c and p must be positive");
    return EpsilonSchedule(Power{c, p});
}

EpsilonSchedule EpsilonSchedule::exponential(double c, double a) {
    if (!(c > 0.0) || !(a > 0.0)) throw SpecError("EpsilonSchedule::exponential: c and a must be positive");
    return EpsilonSchedule(Exponential{c, a});
}

double EpsilonSchedule::value(double t) const {
    struct Visitor {
        double t;
        double operator()(const Zero&) const { return 0.0; }
        double operator()(const Power& p) const { return p.c / std::pow(1.0 + t, p.p); }
        double operator()(const Exponential& e) const { return e.c * std::exp(-e.a * t); }
    };
    return std::visit(Visitor{t}, kind_);
}

double EpsilonSchedule::derivative(double t) const {
    struct Visitor {
        double t;
        double operator()(const Zero&) const { return 0.0; }
        double operator()(const Power& p) const { return -p.c * p.p * std::pow(1.0 + t, -p.p - 1.0); }
        double operator()(const Exponential& e) const { return -e.c * e.a * std::exp(-e.a * t); }
    };
    return std::visit(Visitor{t}, kind_);
}

bool EpsilonSchedule::slow_decay() const {
    if (const auto* p = std::get_if<Power>(&kind_)) return p->p <= 1.0;
    return false;
}

bool EpsilonSchedule::is_zero() const { return std::holds_alternative<Zero>(kind_); }

std::string EpsilonSchedule::describe() const {
    struct Visitor {
        std::string operator()(const Zero&) const { return "eps_zero"; }
        std::string operator()(const Power& p) const { return "eps_pow(" + fmt17(p.c) + ";" + fmt17(p.p) + ")"; }
        std::string operator()(const Exponential& e) const {
            return "eps_exp(" + fmt17(e.c) + ";" + fmt17(e.a) + ")";
        }
    };
    return std::visit(Visitor{}, kind_);
}

double epsilon_value(const EpsilonSchedule& s, double t) { return s.value(t); }
double epsilon_derivative(const EpsilonSchedule& s, double t) { return s.derivative(t); }

// ---------------------------------------------------------------------------
// TikhonovTerm
// ---------------------------------------------------------------------------

Vec TikhonovTerm::grad_theta(const Vec& u) const { return sub(u, center); }

double TikhonovTerm::theta_bar(const Vec& u) const {
    const Vec d = sub(u, center);
    return 0.5 * inner(d, d);
}

// ---------------------------------------------------------------------------
// SystemSpec
// ---------------------------------------------------------------------------

SystemSpec SystemSpec::make(double gamma, PotentialPtr phi, MonotonePtr a, std::optional<TikhonovTerm> tikhonov) {
    if (!(gamma >= 0.0)) throw SpecError("SystemSpec: damping gamma must be nonnegative");
    if (!phi || !a) throw SpecError("SystemSpec: null component");
    if (phi->dim() != a->dim()) throw SpecError("SystemSpec: potential/operator dimensions differ");
    if (tikhonov && tikhonov->center.size() != phi->dim())
        throw SpecError("SystemSpec: Tikhonov center dimension mismatch");
    SystemSpec s;
    s.gamma_ = gamma;
    s.phi_ = std::move(phi);
    s.a_ = std::move(a);
    s.tik_ = std::move(tikhonov);
    s.lambda_ = s.a_->cocoercivity();
    if (s.lambda_) s.lambda_gamma_sq_ = *s.lambda_ * gamma * gamma;
    return s;
}

std::string SystemSpec::describe() const {
    std::string s = "sys(gamma=" + fmt17(gamma_) + ";phi=" + phi_->describe() + ";op=" + a_->describe();
    if (tik_) s += ";tik(center=" + fmt_vec(tik_->center) + ";" + tik_->schedule.describe() + ")";
    return s + ")";
}

std::uint64_t SystemSpec::hash() const { return fnv1a_string(describe()); }

// ---------------------------------------------------------------------------
// Vector field and integrator
// ---------------------------------------------------------------------------

std::pair<Vec, Vec> vector_field(const SystemSpec& sys, const PhaseState& s) {
    return {s.v, acceleration(sys, s)};
}

Vec acceleration(const SystemSpec& sys, const PhaseState& s) {
    if (s.u.size() != sys.dim() || s.v.size() != sys.dim())
        throw DimensionError("vector_field: state dimension mismatch");
    const Vec gphi = sys.phi().gradient(s.u);
    const Vec av = sys.op().apply(s.u);
    Vec acc(s.u.size());
    const double gamma = sys.gamma();
    for (std::size_t i = 0; i < acc.size(); ++i) acc[i] = -gamma * s.v[i] - gphi[i] - av[i];
    if (sys.tikhonov()) {
        const double eps = sys.tikhonov()->schedule.value(s.t);
        const Vec gtheta = sys.tikhonov()->grad_theta(s.u);
        for (std::size_t i = 0; i < acc.size(); ++i) acc[i] -= eps * gtheta[i];
    }
    return acc;
}

namespace {

constexpr double kBlowUpBound = 1e12;

bool within_bounds(const Vec& u, const Vec& v) {
    for (double x : u)
        if (!std::isfinite(x) || std::abs(x) > kBlowUpBound) return false;
    for (double x : v)
        if (!std::isfinite(x) || std::abs(x) > kBlowUpBound) return false;
    return true;
}

}  // namespace

Trajectory integrate(const SystemSpec& sys, const PhaseState& init, double t_end, double step, int sample_every) {
    if (!(step > 0.0)) throw SpecError("integrate: step must be positive");
    if (!(t_end > init.t)) throw SpecError("integrate: t_end must exceed the initial time");
    if (sample_every < 1) throw SpecError("integrate: sample_every must be >= 1");
    const std::size_t n = sys.dim();
    if (init.u.size() != n || init.v.size() != n) throw DimensionError("integrate: state dimension mismatch");

    const long long nsteps = std::llround((t_end - init.t) / step);
    if (nsteps < 1) throw SpecError("integrate: horizon shorter than one step");

    Trajectory traj;
    traj.system_hash = sys.hash();
    traj.settings = IntegratorSettings{t_end, step, sample_every};

    Vec u = init.u, v = init.v;
    double l2 = 0.0;
    traj.samples.push_back(PhaseState{init.t, u, v});
    traj.running_l2_velocity.push_back(l2);

    Vec k1u(n), k1v(n), k2u(n), k2v(n), k3u(n), k3v(n), k4u(n), k4v(n), tu(n), tv(n);
    const double h = step;

    for (long long i = 0; i < nsteps; ++i) {
        const double t = init.t + static_cast<double>(i) * h;
        const double vsq_before = inner(v, v);

        PhaseState st{t, u, v};
        k1u = st.v;
        k1v = acceleration(sys, st);

        for (std::size_t j = 0; j < n; ++j) {
            tu[j] = u[j] + 0.5 * h * k1u[j];
            tv[j] = v[j] + 0.5 * h * k1v[j];
        }
        st = PhaseState{t + 0.5 * h, tu, tv};
        k2u = st.v;
        k2v = acceleration(sys, st);

        for (std::size_t j = 0; j < n; ++j) {
            tu[j] = u[j] + 0.5 * h * k2u[j];
            tv[j] = v[j] + 0.5 * h * k2v[j];
        }
        st = PhaseState{t + 0.5 * h, tu, tv};
        k3u = st.v;
        k3v = acceleration(sys, st);

        for (std::size_t j = 0; j < n; ++j) {
            tu[j] = u[j] + h * k3u[j];
            tv[j] = v[j] + h * k3v[j];
        }
        st = PhaseState{t + h, tu, tv};
        k4u = st.v;
        k4v = acceleration(sys, st);

        for (std::size_t j = 0; j < n; ++j) {
            u[j] += h / 6.0 * (k1u[j] + 2.0 * k2u[j] + 2.0 * k3u[j] + k4u[j]);
            v[j] += h / 6.0 * (k1v[j] + 2.0 * k2v[j] + 2.0 * k3v[j] + k4v[j]);
        }

        if (!within_bounds(u, v)) {
            const auto& last = traj.samples.back();
            throw BlowUpError("integrate: state exceeded blow-up bound at t=" + fmt17(t + h) +
                                  " (last finite sample at t=" + fmt17(last.t) + ")",
                              last);
        }

        l2 += 0.5 * h * (vsq_before + inner(v, v));
        const double tnow = init.t + static_cast<double>(i + 1) * h;
        if ((i + 1) % sample_every == 0 || i + 1 == nsteps) {
            traj.samples.push_back(PhaseState{tnow, u, v});
            traj.running_l2_velocity.push_back(l2);
        }
    }
    return traj;
}

// ---------------------------------------------------------------------------
// Time rescaling
// ---------------------------------------------------------------------------

namespace {

PotentialPtr scale_potential(const PotentialPtr& p, double s) {
    struct Visitor {
        double s;
        const PotentialPtr& p;
        PotentialPtr operator()(const PotentialSpec::Quadratic& q) const {
            return PotentialSpec::quadratic(mat_scale(s, q.q), scale(s, q.c), s * q.c0);
        }
        PotentialPtr operator()(const PotentialSpec::SeparablePower& sp) const {
            return PotentialSpec::separable_power(scale(s, sp.weights), sp.p);
        }
        PotentialPtr operator()(const PotentialSpec::Sum& su) const {
            std::vector<PotentialPtr> terms;
            terms.reserve(su.terms.size());
            for (const auto& t : su.terms) terms.push_back(scale_potential(t, s));
            return PotentialSpec::sum(std::move(terms));
        }
        PotentialPtr operator()(const PotentialSpec::Embedded& e) const {
            return PotentialSpec::embedded(scale_potential(e.base, s), e.offset, e.total_dim);
        }
        PotentialPtr operator()(const PotentialSpec::Zero& z) const { return PotentialSpec::zero(z.dim); }
    };
    return std::visit(Visitor{s, p}, p->kind());
}

}  // namespace

SystemSpec time_rescale(const SystemSpec& sys, double k) {
    if (sys.tikhonov()) throw SpecError("time_rescale: unsupported for systems with a Tikhonov term");
    if (!(k > 0.0)) throw SpecError("time_rescale: k must be positive");
    SystemSpec out;
    out.gamma_ = sys.gamma_ * k;
    out.phi_ = scale_potential(sys.phi_, k * k);
    out.a_ = MonotoneSpec::scaled(k * k, sys.a_);
    out.tik_ = std::nullopt;
    out.lambda_ = out.a_->cocoercivity();
    out.lambda_gamma_sq_ = sys.lambda_gamma_sq_;  // recorded product carries over verbatim
    return out;
}

}  // namespace cocoflow

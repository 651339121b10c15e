#pragma once

// The evolution systems u'' + gamma u' + grad phi(u) + A(u) (+ eps(t) grad
// Theta(u)) = 0 as first-order phase-space vector fields, plus a fixed-step
// RK4 integrator and the time-rescaling transform.

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "cocoflow/core.hpp"
#include "cocoflow/operators.hpp"

namespace cocoflow {

// ---------------------------------------------------------------------------
// Vanishing regularization coefficient eps(t)
// ---------------------------------------------------------------------------

class EpsilonSchedule {
public:
    struct Zero {};
    struct Power {  // eps(t) = c / (1+t)^p
        double c;
        double p;
    };
    struct Exponential {  // eps(t) = c * exp(-a t)
        double c;
        double a;
    };

    static EpsilonSchedule zero();
    static EpsilonSchedule power(double c, double p);
    static EpsilonSchedule exponential(double c, double a);

    double value(double t) const;
    double derivative(double t) const;
    /// true iff the schedule has a divergent integral (power kind with p <= 1)
    bool slow_decay() const;
    bool is_zero() const;
    std::string describe() const;

private:
    using Kind = std::variant<Zero, Power, Exponential>;
    explicit EpsilonSchedule(Kind k) : kind_(std::move(k)) {}
    Kind kind_;
};

double epsilon_value(const EpsilonSchedule& s, double t);
double epsilon_derivative(const EpsilonSchedule& s, double t);

// ---------------------------------------------------------------------------
// System specification
// ---------------------------------------------------------------------------

/// Theta(x) = 0.5*|x - center|^2: 1-strongly monotone, 1-Lipschitz gradient.
struct TikhonovTerm {
    Vec center;
    EpsilonSchedule schedule;
    double eta = 1.0;    // strong monotonicity constant of grad Theta
    double delta = 1.0;  // Lipschitz constant of grad Theta

    Vec grad_theta(const Vec& u) const;
    /// Theta(u) - inf Theta (the infimum is 0 at the center)
    double theta_bar(const Vec& u) const;
};

class SystemSpec {
public:
    static SystemSpec make(double gamma, PotentialPtr phi, MonotonePtr a,
                           std::optional<TikhonovTerm> tikhonov = std::nullopt);

    double gamma() const { return gamma_; }
    const PotentialSpec& phi() const { return *phi_; }
    const PotentialPtr& phi_ptr() const { return phi_; }
    const MonotoneSpec& op() const { return *a_; }
    const MonotonePtr& op_ptr() const { return a_; }
    const std::optional<TikhonovTerm>& tikhonov() const { return tik_; }

    std::optional<double> lambda() const { return lambda_; }
    /// recorded once at construction; copied verbatim by time_rescale
    std::optional<double> lambda_gamma_sq() const { return lambda_gamma_sq_; }
    bool condition_holds() const { return lambda_gamma_sq_ && *lambda_gamma_sq_ > 1.0; }

    std::uint64_t hash() const;
    std::string describe() const;
    std::size_t dim() const { return phi_->dim(); }

private:
    SystemSpec() = default;
    double gamma_ = 1.0;
    PotentialPtr phi_;
    MonotonePtr a_;
    std::optional<TikhonovTerm> tik_;
    std::optional<double> lambda_;
    std::optional<double> lambda_gamma_sq_;

    friend SystemSpec time_rescale(const SystemSpec&, double);
};

// ---------------------------------------------------------------------------
// Trajectories
// ---------------------------------------------------------------------------

struct PhaseState {
    double t = 0.0;
    Vec u;
    Vec v;  // velocity du/dt
};

struct IntegratorSettings {
    double t_end = 50.0;
    double step = 1e-3;
    int sample_every = 100;
};

struct Trajectory {
    std::vector<PhaseState> samples;          // strictly increasing times
    std::vector<double> running_l2_velocity;  // trapezoid of |u'|^2, per sample
    std::uint64_t system_hash = 0;
    IntegratorSettings settings;
};

/// Raised when a state component exceeds the blow-up bound; carries the last
/// finite state so callers can report where the trajectory left the chart.
class BlowUpError : public Error {
public:
    BlowUpError(const std::string& msg, PhaseState last)
        : Error(msg), last_finite_state(std::move(last)) {}
    PhaseState last_finite_state;
};

// ---------------------------------------------------------------------------
// Operations
// ---------------------------------------------------------------------------

/// (u', -gamma u' - grad phi(u) - A(u) - eps(t) grad Theta(u))
std::pair<Vec, Vec> vector_field(const SystemSpec& sys, const PhaseState& s);

/// Acceleration u'' reconstructed from the equation right-hand side.
Vec acceleration(const SystemSpec& sys, const PhaseState& s);

/// Classical fixed-step RK4. States recorded every sample_every steps plus
/// the final state; the |u'|^2 integral is accumulated at every step.
Trajectory integrate(const SystemSpec& sys, const PhaseState& init, double t_end, double step, int sample_every);

/// gamma -> gamma*k, phi -> k^2 phi, A -> k^2 A (cocoercivity lambda/k^2).
/// Refuses systems with a Tikhonov term. The recorded lambda*gamma^2 product
/// carries over bit-identically.
SystemSpec time_rescale(const SystemSpec& sys, double k);

}  // namespace cocoflow

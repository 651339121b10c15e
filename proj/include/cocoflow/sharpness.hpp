#pragma once

// Closed-form analysis of the planar rotation counterexample: the damped
// second-order system driven by the Yosida approximation of the pi/2
// rotation. Characteristic roots are carried as real pairs (a, b); the
// classification cross-checks three algebraically equivalent criteria.

#include <array>
#include <string>

#include "cocoflow/core.hpp"

namespace cocoflow {

struct RotationCase {
    double gamma;
    double lambda;
    double theta() const { return lambda * gamma * gamma; }
};

/// Roots of r^2 + gamma r + (lambda - i)/(1+lambda^2) = 0 as real pairs:
/// r1 = a1 - i b, r2 = a2 + i b, with the radical intermediates x, y.
struct CharacteristicRoots {
    double x = 0.0;
    double y = 0.0;
    double a1 = 0.0;
    double a2 = 0.0;
    double b = 0.0;
};

enum class Stability { Converging, NonConverging };

struct StabilityVerdict {
    RotationCase params{};
    CharacteristicRoots roots;
    double theta = 0.0;
    Stability verdict = Stability::Converging;  // from the sign of a2
    bool cir1_nonconverging = false;            // radical inequality
    bool theta_form_nonconverging = false;      // gamma^4 (1-theta) >= theta^3
    /// the blanket theta < 1 claim, reported alongside the root verdict
    bool theta_claim_nonconverging = false;
    bool claim_matches_roots = true;
};

/// B_lambda = 1/(1+lambda^2) * [[lambda, -1], [1, lambda]]
Mat yosida_rotation_matrix(double lambda);

/// The pi/2 rotation [[0,-1],[1,0]].
Mat rotation_matrix();

CharacteristicRoots characteristic_roots(const RotationCase& c);

/// Residual |r^2 + gamma r + (lambda - i)/(1+lambda^2)| at r = re + i*im,
/// evaluated in real-pair arithmetic.
double esd_residual(const RotationCase& c, double re, double im);

/// Classification from the sign of a2, with the two equivalent inequality
/// forms evaluated independently; disagreement beyond 1e-10 is an
/// internal-consistency error.
StabilityVerdict classify(const RotationCase& c);

/// Position/velocity of c1 U1 + c2 U2 + c3 U3 + c4 U4 at time t, with the
/// velocity obtained by analytic differentiation of the basis.
std::pair<Vec, Vec> closed_form_solution(const RotationCase& c, const std::array<double, 4>& coeffs, double t);

/// Coefficients reproducing (u0, v0) at t = 0; throws SpecError naming the
/// degenerate parameters when the 4x4 basis matrix is singular.
std::array<double, 4> fit_coefficients(const RotationCase& c, const Vec& u0, const Vec& v0);

std::string to_string(Stability s);

}  // namespace cocoflow

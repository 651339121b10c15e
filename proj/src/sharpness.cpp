#include "cocoflow/sharpness.hpp"

#include <cmath>

namespace cocoflow {

namespace {

double clamped_sqrt(double radicand, const char* who) {
    // Radicands are nonnegative up to floating-point dust; anything more
    // negative indicates a transcription error in the printed formulas.
    if (radicand < -1e-14)
        throw Error(std::string(who) + ": radicand significantly negative (" + fmt17(radicand) + ")");
    return std::sqrt(std::max(0.0, radicand));
}

}  // namespace

Mat rotation_matrix() { return Mat(2, 2, {0.0, -1.0, 1.0, 0.0}); }

Mat yosida_rotation_matrix(double lambda) {
    if (!(lambda > 0.0)) throw SpecError("yosida_rotation_matrix: lambda must be positive");
    const double f = 1.0 / (1.0 + lambda * lambda);
    return Mat(2, 2, {f * lambda, -f, f, f * lambda});
}

CharacteristicRoots characteristic_roots(const RotationCase& c) {
    if (!(c.gamma > 0.0) || !(c.lambda > 0.0))
        throw SpecError("characteristic_roots: gamma and lambda must be positive");
    const double g2 = c.gamma * c.gamma;
    const double onepl2 = 1.0 + c.lambda * c.lambda;
    const double e = g2 - 4.0 * c.lambda / onepl2;
    const double f = clamped_sqrt(e * e + 16.0 / (onepl2 * onepl2), "characteristic_roots (discriminant modulus)");

    CharacteristicRoots r;
    r.x = (1.0 / std::sqrt(2.0)) * clamped_sqrt(e + f, "characteristic_roots (x)");
    r.y = (1.0 / std::sqrt(2.0)) * clamped_sqrt(-e + f, "characteristic_roots (y)");
    r.a1 = 0.5 * (-c.gamma - r.x);
    r.a2 = 0.5 * (-c.gamma + r.x);
    r.b = (1.0 / (2.0 * std::sqrt(2.0))) * clamped_sqrt(-e + f, "characteristic_roots (b)");
    return r;
}

double esd_residual(const RotationCase& c, double re, double im) {
    const double onepl2 = 1.0 + c.lambda * c.lambda;
    // r^2 + gamma r + (lambda - i)/(1+lambda^2), split into real/imag parts
    const double real_part = re * re - im * im + c.gamma * re + c.lambda / onepl2;
    const double imag_part = 2.0 * re * im + c.gamma * im - 1.0 / onepl2;
    return std::sqrt(real_part * real_part + imag_part * imag_part);
}

StabilityVerdict classify(const RotationCase& c) {
    StabilityVerdict v;
    v.params = c;
    v.roots = characteristic_roots(c);
    v.theta = c.theta();
    v.verdict = v.roots.a2 >= 0.0 ? Stability::NonConverging : Stability::Converging;

    const double g2 = c.gamma * c.gamma;
    const double onepl2 = 1.0 + c.lambda * c.lambda;
    const double cir1_lhs =
        clamped_sqrt(g2 * g2 - 8.0 * g2 * c.lambda / onepl2 + 16.0 / onepl2, "classify (cir1 radical)");
    const double cir1_rhs = g2 + 4.0 * c.lambda / onepl2;
    v.cir1_nonconverging = cir1_lhs >= cir1_rhs;

    const double theta = v.theta;
    v.theta_form_nonconverging = g2 * g2 * (1.0 - theta) >= theta * theta * theta;

    v.theta_claim_nonconverging = theta < 1.0;
    v.claim_matches_roots = v.theta_claim_nonconverging == (v.verdict == Stability::NonConverging);

    // Three-way consistency: the criteria are algebraically equivalent, so a
    // disagreement can only come from a transcription slip. Points within
    // 1e-10 of the boundary are exempt from the cross-check.
    const bool a2_nc = v.verdict == Stability::NonConverging;
    const bool near_boundary_cir1 = std::abs(cir1_lhs - cir1_rhs) <= 1e-10 * (1.0 + cir1_rhs);
    const bool near_boundary_a2 = std::abs(v.roots.a2) <= 1e-10 * (1.0 + c.gamma);
    const bool near_boundary_theta =
        std::abs(g2 * g2 * (1.0 - theta) - theta * theta * theta) <= 1e-10 * (1.0 + theta * theta * theta);
    if (!near_boundary_a2 && !near_boundary_cir1 && !near_boundary_theta) {
        if (a2_nc != v.cir1_nonconverging || a2_nc != v.theta_form_nonconverging) {
            throw Error("classify: criteria disagree at gamma=" + fmt17(c.gamma) + " lambda=" + fmt17(c.lambda) +
                        " (a2=" + fmt17(v.roots.a2) + ", cir1=" + std::to_string(v.cir1_nonconverging) +
                        ", theta-form=" + std::to_string(v.theta_form_nonconverging) + ")");
        }
    }
    return v;
}

std::pair<Vec, Vec> closed_form_solution(const RotationCase& c, const std::array<double, 4>& coeffs, double t) {
    const CharacteristicRoots r = characteristic_roots(c);
    const double e1 = std::exp(r.a1 * t);
    const double e2 = std::exp(r.a2 * t);
    const double cb = std::cos(r.b * t);
    const double sb = std::sin(r.b * t);

    // U1 = e^{a1 t} ( cb,  sb),  U2 = e^{a1 t} (-sb, cb)
    // U3 = e^{a2 t} ( cb, -sb),  U4 = e^{a2 t} ( sb, cb)
    const double u1x = e1 * cb, u1y = e1 * sb;
    const double u2x = -e1 * sb, u2y = e1 * cb;
    const double u3x = e2 * cb, u3y = -e2 * sb;
    const double u4x = e2 * sb, u4y = e2 * cb;

    const double d1x = e1 * (r.a1 * cb - r.b * sb), d1y = e1 * (r.a1 * sb + r.b * cb);
    const double d2x = e1 * (-r.a1 * sb - r.b * cb), d2y = e1 * (r.a1 * cb - r.b * sb);
    const double d3x = e2 * (r.a2 * cb - r.b * sb), d3y = e2 * (-r.a2 * sb - r.b * cb);
    const double d4x = e2 * (r.a2 * sb + r.b * cb), d4y = e2 * (r.a2 * cb - r.b * sb);

    const auto& q = coeffs;
    Vec u{q[0] * u1x + q[1] * u2x + q[2] * u3x + q[3] * u4x, q[0] * u1y + q[1] * u2y + q[2] * u3y + q[3] * u4y};
    Vec v{q[0] * d1x + q[1] * d2x + q[2] * d3x + q[3] * d4x, q[0] * d1y + q[1] * d2y + q[2] * d3y + q[3] * d4y};
    return {std::move(u), std::move(v)};
}

std::array<double, 4> fit_coefficients(const RotationCase& c, const Vec& u0, const Vec& v0) {
    if (u0.size() != 2 || v0.size() != 2) throw DimensionError("fit_coefficients: planar states expected");
    const CharacteristicRoots r = characteristic_roots(c);
    // columns are (U_k(0), U_k'(0))
    const Mat basis(4, 4,
                    {1.0, 0.0, 1.0, 0.0,      //
                     0.0, 1.0, 0.0, 1.0,      //
                     r.a1, -r.b, r.a2, r.b,   //
                     r.b, r.a1, -r.b, r.a2});
    Vec rhs{u0[0], u0[1], v0[0], v0[1]};
    Vec sol;
    try {
        sol = solve_linear(basis, rhs, 1e-10);
    } catch (const SingularMatrixError&) {
        throw SpecError("fit_coefficients: degenerate basis at gamma=" + fmt17(c.gamma) +
                        " lambda=" + fmt17(c.lambda) + " (a1=" + fmt17(r.a1) + ", a2=" + fmt17(r.a2) +
                        ", b=" + fmt17(r.b) + ")");
    }
    return {sol[0], sol[1], sol[2], sol[3]};
}

std::string to_string(Stability s) { return s == Stability::Converging ? "converging" : "non-converging"; }

}  // namespace cocoflow

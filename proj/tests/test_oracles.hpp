#pragma once

// Test-side oracles, independent of the library code paths they check:
// central finite differences for gradients, and eigenvalues of small real
// matrices via the characteristic polynomial and Durand-Kerner iteration.

#include <array>
#include <cmath>
#include <complex>
#include <vector>

#include "cocoflow/core.hpp"
#include "cocoflow/operators.hpp"

namespace oracle {

using cocoflow::Mat;
using cocoflow::Vec;

inline Vec finite_difference_gradient(const cocoflow::PotentialSpec& p, const Vec& x, double step = 1e-6) {
    Vec g(x.size(), 0.0);
    for (std::size_t i = 0; i < x.size(); ++i) {
        Vec plus = x, minus = x;
        plus[i] += step;
        minus[i] -= step;
        g[i] = (p.value(plus) - p.value(minus)) / (2.0 * step);
    }
    return g;
}

/// Characteristic polynomial coefficients by Faddeev-LeVerrier:
/// p(s) = s^n + c[0] s^(n-1) + ... + c[n-1].
inline std::vector<double> characteristic_polynomial(const Mat& a) {
    const std::size_t n = a.rows;
    Mat m = Mat::zero(n, n);
    std::vector<double> c(n, 0.0);
    Mat am = Mat::zero(n, n);
    for (std::size_t k = 1; k <= n; ++k) {
        // M_k = A * M_{k-1} + c_{k-1} I
        if (k == 1) {
            m = Mat::identity(n);
        } else {
            m = am;
            for (std::size_t i = 0; i < n; ++i) m.at(i, i) += c[k - 2];
        }
        am = cocoflow::matmul(a, m);
        double tr = 0.0;
        for (std::size_t i = 0; i < n; ++i) tr += am.at(i, i);
        c[k - 1] = -tr / static_cast<double>(k);
    }
    return c;
}

/// All roots of s^n + c[0] s^(n-1) + ... + c[n-1] by Durand-Kerner.
inline std::vector<std::complex<double>> polynomial_roots(const std::vector<double>& c) {
    const std::size_t n = c.size();
    std::vector<std::complex<double>> z(n);
    const std::complex<double> seed(0.4, 0.9);
    std::complex<double> acc(1.0, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        acc *= seed;
        z[i] = acc;
    }
    auto eval = [&](std::complex<double> s) {
        std::complex<double> v(1.0, 0.0);
        for (std::size_t i = 0; i < n; ++i) v = v * s + c[i];
        return v;
    };
    for (int it = 0; it < 500; ++it) {
        double moved = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            std::complex<double> denom(1.0, 0.0);
            for (std::size_t j = 0; j < n; ++j)
                if (j != i) denom *= (z[i] - z[j]);
            const std::complex<double> delta = eval(z[i]) / denom;
            z[i] -= delta;
            moved = std::max(moved, std::abs(delta));
        }
        if (moved < 1e-14) break;
    }
    return z;
}

/// Max real part of the eigenvalues of a (small) real matrix.
inline double max_real_eigenvalue_part(const Mat& a) {
    const auto roots = polynomial_roots(characteristic_polynomial(a));
    double best = -1e300;
    for (const auto& r : roots) best = std::max(best, r.real());
    return best;
}

/// First-order companion matrix of X'' + gamma X' + B X = 0.
inline Mat companion_matrix(const Mat& b, double gamma) {
    const std::size_t n = b.rows;
    Mat m(2 * n, 2 * n);
    for (std::size_t i = 0; i < n; ++i) m.at(i, n + i) = 1.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) m.at(n + i, j) = -b.at(i, j);
    for (std::size_t i = 0; i < n; ++i) m.at(n + i, n + i) = -gamma;
    return m;
}

}  // namespace oracle

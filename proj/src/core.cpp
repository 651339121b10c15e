#include "cocoflow/core.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <limits>

namespace cocoflow {

void require_same_dim(const Vec& a, const Vec& b, const char* where) {
    if (a.size() != b.size()) {
        throw DimensionError(std::string(where) + ": dimension mismatch (" +
                             std::to_string(a.size()) + " vs " + std::to_string(b.size()) + ")");
    }
}

double inner(const Vec& a, const Vec& b) {
    require_same_dim(a, b, "inner");
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

double norm(const Vec& a) { return std::sqrt(inner(a, a)); }

Vec add(const Vec& a, const Vec& b) {
    require_same_dim(a, b, "add");
    Vec r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] + b[i];
    return r;
}

Vec sub(const Vec& a, const Vec& b) {
    require_same_dim(a, b, "sub");
    Vec r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
    return r;
}

Vec scale(double s, const Vec& a) {
    Vec r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = s * a[i];
    return r;
}

void axpy(double s, const Vec& x, Vec& y) {
    require_same_dim(x, y, "axpy");
    for (std::size_t i = 0; i < x.size(); ++i) y[i] += s * x[i];
}

Vec zeros(std::size_t n) { return Vec(n, 0.0); }

bool all_finite(const Vec& a) {
    for (double v : a)
        if (!std::isfinite(v)) return false;
    return true;
}

// ---------------------------------------------------------------------------
// Mat
// ---------------------------------------------------------------------------

Mat::Mat(std::size_t r, std::size_t c, std::vector<double> entries) : rows(r), cols(c), a(std::move(entries)) {
    if (a.size() != rows * cols) throw SpecError("Mat: entry count does not match rows*cols");
}

Mat Mat::identity(std::size_t n) {
    Mat m(n, n);
    for (std::size_t i = 0; i < n; ++i) m.at(i, i) = 1.0;
    return m;
}

Mat Mat::zero(std::size_t r, std::size_t c) { return Mat(r, c); }

Vec mul(const Mat& m, const Vec& x) {
    if (m.cols != x.size()) throw DimensionError("Mat apply: cols != dim(x)");
    Vec r(m.rows, 0.0);
    for (std::size_t i = 0; i < m.rows; ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < m.cols; ++j) s += m.at(i, j) * x[j];
        r[i] = s;
    }
    return r;
}

Mat transpose(const Mat& m) {
    Mat t(m.cols, m.rows);
    for (std::size_t i = 0; i < m.rows; ++i)
        for (std::size_t j = 0; j < m.cols; ++j) t.at(j, i) = m.at(i, j);
    return t;
}

Mat matmul(const Mat& a, const Mat& b) {
    if (a.cols != b.rows) throw DimensionError("matmul: inner dimensions differ");
    Mat r(a.rows, b.cols);
    for (std::size_t i = 0; i < a.rows; ++i)
        for (std::size_t k = 0; k < a.cols; ++k) {
            const double aik = a.at(i, k);
            if (aik == 0.0) continue;
            for (std::size_t j = 0; j < b.cols; ++j) r.at(i, j) += aik * b.at(k, j);
        }
    return r;
}

Mat mat_add(const Mat& a, const Mat& b) {
    if (a.rows != b.rows || a.cols != b.cols) throw DimensionError("mat_add: shape mismatch");
    Mat r = a;
    for (std::size_t i = 0; i < r.a.size(); ++i) r.a[i] += b.a[i];
    return r;
}

Mat mat_scale(double s, const Mat& m) {
    Mat r = m;
    for (double& v : r.a) v *= s;
    return r;
}

bool is_symmetric(const Mat& m, double tol) {
    if (!m.square()) return false;
    for (std::size_t i = 0; i < m.rows; ++i)
        for (std::size_t j = i + 1; j < m.cols; ++j)
            if (std::abs(m.at(i, j) - m.at(j, i)) > tol) return false;
    return true;
}

double frobenius_norm(const Mat& m) {
    double s = 0.0;
    for (double v : m.a) s += v * v;
    return std::sqrt(s);
}

Vec solve_linear(const Mat& m, const Vec& b, double tol) {
    if (!m.square()) throw SpecError("solve_linear: matrix must be square");
    if (m.rows != b.size()) throw DimensionError("solve_linear: rhs dimension mismatch");
    const std::size_t n = m.rows;

    // augmented copy, partial pivoting
    Mat w = m;
    Vec rhs = b;
    std::vector<std::size_t> perm(n);
    for (std::size_t i = 0; i < n; ++i) perm[i] = i;

    bool degenerate = false;
    for (std::size_t col = 0; col < n && !degenerate; ++col) {
        std::size_t piv = col;
        double best = std::abs(w.at(col, col));
        for (std::size_t r = col + 1; r < n; ++r) {
            const double v = std::abs(w.at(r, col));
            if (v > best) {
                best = v;
                piv = r;
            }
        }
        if (best == 0.0) {
            degenerate = true;
            break;
        }
        if (piv != col) {
            for (std::size_t j = 0; j < n; ++j) std::swap(w.at(piv, j), w.at(col, j));
            std::swap(rhs[piv], rhs[col]);
        }
        for (std::size_t r = col + 1; r < n; ++r) {
            const double f = w.at(r, col) / w.at(col, col);
            if (f == 0.0) continue;
            w.at(r, col) = 0.0;
            for (std::size_t j = col + 1; j < n; ++j) w.at(r, j) -= f * w.at(col, j);
            rhs[r] -= f * rhs[col];
        }
    }

    Vec x(n, 0.0);
    if (!degenerate) {
        for (std::size_t ii = n; ii-- > 0;) {
            double s = rhs[ii];
            for (std::size_t j = ii + 1; j < n; ++j) s -= w.at(ii, j) * x[j];
            x[ii] = s / w.at(ii, ii);
        }
    }

    const double residual = degenerate || !all_finite(x)
                                ? std::numeric_limits<double>::infinity()
                                : norm(sub(mul(m, x), b));
    if (!(residual <= tol * (1.0 + norm(b)))) {
        throw SingularMatrixError(
            "solve_linear: matrix singular to tolerance (residual " + std::to_string(residual) + ")", residual);
    }
    return x;
}

std::vector<double> symmetric_eigenvalues(const Mat& m) {
    if (!is_symmetric(m, 1e-9)) throw SpecError("symmetric_eigenvalues: matrix not symmetric");
    const std::size_t n = m.rows;
    Mat a = m;
    // cyclic Jacobi sweeps
    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j) off += a.at(i, j) * a.at(i, j);
        if (off < 1e-30) break;
        for (std::size_t p = 0; p < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double apq = a.at(p, q);
                if (std::abs(apq) < 1e-300) continue;
                const double theta = (a.at(q, q) - a.at(p, p)) / (2.0 * apq);
                const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (std::size_t k = 0; k < n; ++k) {
                    const double akp = a.at(k, p), akq = a.at(k, q);
                    a.at(k, p) = c * akp - s * akq;
                    a.at(k, q) = s * akp + c * akq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double apk = a.at(p, k), aqk = a.at(q, k);
                    a.at(p, k) = c * apk - s * aqk;
                    a.at(q, k) = s * apk + c * aqk;
                }
            }
        }
    }
    std::vector<double> ev(n);
    for (std::size_t i = 0; i < n; ++i) ev[i] = a.at(i, i);
    std::sort(ev.begin(), ev.end());
    return ev;
}

double symmetric_max_eigenvalue(const Mat& m) { return symmetric_eigenvalues(m).back(); }

double operator_norm(const Mat& m) {
    const Mat mtm = matmul(transpose(m), m);
    const double l = symmetric_max_eigenvalue(mtm);
    return std::sqrt(std::max(0.0, l));
}

// ---------------------------------------------------------------------------
// Rng
// ---------------------------------------------------------------------------

std::uint64_t Rng::next_u64() {
    // splitmix64
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

double Rng::uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

double Rng::uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

double Rng::normal() {
    if (have_spare_) {
        have_spare_ = false;
        return spare_;
    }
    double u1 = uniform01();
    while (u1 <= 0.0) u1 = uniform01();
    const double u2 = uniform01();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 6.283185307179586476925286766559 * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
}

Vec Rng::uniform_vec(std::size_t dim, double lo, double hi) {
    Vec v(dim);
    for (auto& x : v) x = uniform(lo, hi);
    return v;
}

Vec Rng::vec_in_ball(std::size_t dim, double radius) {
    Vec v(dim);
    for (auto& x : v) x = normal();
    const double n = norm(v);
    if (n == 0.0) return zeros(dim);
    const double r = radius * std::pow(uniform01(), 1.0 / static_cast<double>(dim));
    return scale(r / n, v);
}

std::uint64_t Rng::derive(std::uint64_t seed, std::uint64_t tag) {
    Rng r(seed ^ (tag * 0x9e3779b97f4a7c15ull + 0x632be59bd9b4e019ull));
    return r.next_u64();
}

std::uint64_t fnv1a(const void* data, std::size_t n, std::uint64_t h) {
    const unsigned char* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < n; ++i) {
        h ^= p[i];
        h *= 1099511628211ull;
    }
    return h;
}

std::uint64_t fnv1a_string(const std::string& s, std::uint64_t h) { return fnv1a(s.data(), s.size(), h); }

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string fmt_vec(const Vec& v, char sep) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) s.push_back(sep);
        s += fmt17(v[i]);
    }
    return s;
}

}  // namespace cocoflow

#pragma once

// Dense finite-dimensional vector/matrix algebra shared by every module.
// Everything is IEEE double, value-semantic and immutable after construction;
// all functions here are pure and safe to call concurrently.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace cocoflow {

using Vec = std::vector<double>;

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class DimensionError : public Error {
public:
    using Error::Error;
};

/// Thrown by solve_linear when the matrix is singular at the requested
/// tolerance; carries the best residual achieved.
class SingularMatrixError : public Error {
public:
    SingularMatrixError(const std::string& msg, double residual)
        : Error(msg), residual(residual) {}
    double residual;
};

/// Thrown by iterative solvers that exhaust their iteration budget.
class IterationError : public Error {
public:
    IterationError(const std::string& msg, double best_residual)
        : Error(msg), best_residual(best_residual) {}
    double best_residual;
};

/// Invalid construction of a spec object (bad dimensions, constants, ...).
class SpecError : public Error {
public:
    using Error::Error;
};

// ---------------------------------------------------------------------------
// Vec helpers
// ---------------------------------------------------------------------------

void require_same_dim(const Vec& a, const Vec& b, const char* where);

double inner(const Vec& a, const Vec& b);
double norm(const Vec& a);

Vec add(const Vec& a, const Vec& b);
Vec sub(const Vec& a, const Vec& b);
Vec scale(double s, const Vec& a);
/// y += s*x
void axpy(double s, const Vec& x, Vec& y);
Vec zeros(std::size_t n);

bool all_finite(const Vec& a);

// ---------------------------------------------------------------------------
// Mat: dense row-major matrix
// ---------------------------------------------------------------------------

struct Mat {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> a;  // row-major, rows*cols entries

    Mat() = default;
    Mat(std::size_t r, std::size_t c) : rows(r), cols(c), a(r * c, 0.0) {}
    Mat(std::size_t r, std::size_t c, std::vector<double> entries);

    double& at(std::size_t i, std::size_t j) { return a[i * cols + j]; }
    double at(std::size_t i, std::size_t j) const { return a[i * cols + j]; }

    static Mat identity(std::size_t n);
    static Mat zero(std::size_t r, std::size_t c);

    bool square() const { return rows == cols; }
};

Vec mul(const Mat& m, const Vec& x);
Mat transpose(const Mat& m);
Mat matmul(const Mat& a, const Mat& b);
Mat mat_add(const Mat& a, const Mat& b);
Mat mat_scale(double s, const Mat& m);
bool is_symmetric(const Mat& m, double tol = 1e-12);

/// Frobenius norm; cheap deterministic upper bound on the operator norm.
double frobenius_norm(const Mat& m);

/// Solves M x = b by partial-pivot Gaussian elimination.
/// Postcondition: |M x - b| <= tol * (1 + |b|), else SingularMatrixError
/// carrying the residual achieved.
Vec solve_linear(const Mat& m, const Vec& b, double tol = 1e-10);

/// All eigenvalues of a symmetric matrix by the cyclic Jacobi method,
/// sorted ascending. Throws SpecError if m is not symmetric.
std::vector<double> symmetric_eigenvalues(const Mat& m);

/// Largest eigenvalue of a symmetric PSD matrix (convenience wrapper).
double symmetric_max_eigenvalue(const Mat& m);

/// Spectral operator norm sqrt(lambda_max(M^T M)).
double operator_norm(const Mat& m);

// ---------------------------------------------------------------------------
// Deterministic RNG
// ---------------------------------------------------------------------------

/// splitmix64-based generator. Distributions are hand-rolled from raw bits so
/// byte-identical streams do not depend on the standard library vendor.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64();
    /// uniform in [0, 1)
    double uniform01();
    double uniform(double lo, double hi);
    /// standard normal via Box-Muller
    double normal();

    Vec uniform_vec(std::size_t dim, double lo, double hi);
    /// uniform direction scaled by a uniform radius in [0, radius]
    Vec vec_in_ball(std::size_t dim, double radius);

    /// stable sub-stream derivation, for per-task seeding
    static std::uint64_t derive(std::uint64_t seed, std::uint64_t tag);

private:
    std::uint64_t state_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

/// FNV-1a over bytes; used for stable spec hashing.
std::uint64_t fnv1a(const void* data, std::size_t n, std::uint64_t h = 1469598103934665603ull);
std::uint64_t fnv1a_string(const std::string& s, std::uint64_t h = 1469598103934665603ull);

/// Shortest text form that round-trips an IEEE double exactly ("%.17g").
std::string fmt17(double v);
std::string fmt_vec(const Vec& v, char sep = ',');

}  // namespace cocoflow

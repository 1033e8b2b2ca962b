#pragma once

// Exact-size complex linear algebra for 2x2 state-space operators and
// small (n <= 4) real/complex matrices.
//
// Basis ordering is fixed globally: component 0 <-> |1> (excited),
// component 1 <-> |0> (ground).

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <initializer_list>
#include <limits>
#include <vector>

#include "povmprep/errors.hpp"

namespace povmprep {

using Complex = std::complex<double>;

inline bool is_finite(Complex z) {
    return std::isfinite(z.real()) && std::isfinite(z.imag());
}

/// Two-component amplitude vector; c1 multiplies |1>, c0 multiplies |0>.
struct Vec2 {
    Complex c1{};
    Complex c0{};

    double norm2() const { return std::norm(c1) + std::norm(c0); }
    double norm() const { return std::sqrt(norm2()); }
};

inline Vec2 operator+(Vec2 a, Vec2 b) { return {a.c1 + b.c1, a.c0 + b.c0}; }
inline Vec2 operator-(Vec2 a, Vec2 b) { return {a.c1 - b.c1, a.c0 - b.c0}; }
inline Vec2 operator*(Complex s, Vec2 v) { return {s * v.c1, s * v.c0}; }

/// <a|b>, conjugate-linear in the first argument.
inline Complex inner(Vec2 a, Vec2 b) {
    return std::conj(a.c1) * b.c1 + std::conj(a.c0) * b.c0;
}

/// 2x2 complex matrix, row-major, basis ordering |1>, |0>.
class Mat2 {
public:
    Mat2() = default;
    Mat2(Complex e00, Complex e01, Complex e10, Complex e11)
        : e_{e00, e01, e10, e11} {}

    static Mat2 identity() { return {1.0, 0.0, 0.0, 1.0}; }
    static Mat2 zero() { return {}; }

    /// |a><b|
    static Mat2 outer(Vec2 a, Vec2 b) {
        return {a.c1 * std::conj(b.c1), a.c1 * std::conj(b.c0),
                a.c0 * std::conj(b.c1), a.c0 * std::conj(b.c0)};
    }

    Complex operator()(int r, int c) const { return e_[2 * r + c]; }
    Complex& operator()(int r, int c) { return e_[2 * r + c]; }

    Complex trace() const { return e_[0] + e_[3]; }
    Complex det() const { return e_[0] * e_[3] - e_[1] * e_[2]; }

    Mat2 adjoint() const {
        return {std::conj(e_[0]), std::conj(e_[2]),
                std::conj(e_[1]), std::conj(e_[3])};
    }

    Vec2 apply(Vec2 v) const {
        return {e_[0] * v.c1 + e_[1] * v.c0, e_[2] * v.c1 + e_[3] * v.c0};
    }

    double max_abs() const {
        double m = 0.0;
        for (auto z : e_) m = std::max(m, std::abs(z));
        return m;
    }

    double hermiticity_defect() const {
        double m = 0.0;
        Mat2 adj = adjoint();
        for (int r = 0; r < 2; ++r)
            for (int c = 0; c < 2; ++c)
                m = std::max(m, std::abs((*this)(r, c) - adj(r, c)));
        return m;
    }

private:
    std::array<Complex, 4> e_{};
};

inline Mat2 operator+(const Mat2& a, const Mat2& b) {
    Mat2 r;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) r(i, j) = a(i, j) + b(i, j);
    return r;
}

inline Mat2 operator-(const Mat2& a, const Mat2& b) {
    Mat2 r;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) r(i, j) = a(i, j) - b(i, j);
    return r;
}

inline Mat2 operator*(const Mat2& a, const Mat2& b) {
    Mat2 r;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            r(i, j) = a(i, 0) * b(0, j) + a(i, 1) * b(1, j);
    return r;
}

inline Mat2 operator*(Complex s, const Mat2& a) {
    Mat2 r;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) r(i, j) = s * a(i, j);
    return r;
}

inline double max_abs_diff(const Mat2& a, const Mat2& b) {
    return (a - b).max_abs();
}

/// Square matrix of fixed small size n in [1, 4].
template <typename T>
class MatN {
public:
    explicit MatN(int n) : n_(n) {
        if (n < 1 || n > 4) throw Error("MatN: size must be in [1, 4]");
    }

    static MatN identity(int n) {
        MatN m(n);
        for (int i = 0; i < n; ++i) m(i, i) = T(1);
        return m;
    }

    int size() const { return n_; }

    T operator()(int r, int c) const { return e_[4 * r + c]; }
    T& operator()(int r, int c) { return e_[4 * r + c]; }

    double max_abs() const {
        double m = 0.0;
        for (int r = 0; r < n_; ++r)
            for (int c = 0; c < n_; ++c)
                m = std::max(m, std::abs((*this)(r, c)));
        return m;
    }

    MatN operator*(const MatN& o) const {
        MatN r(n_);
        for (int i = 0; i < n_; ++i)
            for (int j = 0; j < n_; ++j) {
                T s{};
                for (int k = 0; k < n_; ++k) s += (*this)(i, k) * o(k, j);
                r(i, j) = s;
            }
        return r;
    }

    /// max-norm of (this - other)
    double max_abs_diff(const MatN& o) const {
        double m = 0.0;
        for (int r = 0; r < n_; ++r)
            for (int c = 0; c < n_; ++c)
                m = std::max(m, std::abs((*this)(r, c) - o(r, c)));
        return m;
    }

    /// infinity norm (max absolute row sum)
    double inf_norm() const {
        double m = 0.0;
        for (int r = 0; r < n_; ++r) {
            double s = 0.0;
            for (int c = 0; c < n_; ++c) s += std::abs((*this)(r, c));
            m = std::max(m, s);
        }
        return m;
    }

private:
    int n_;
    std::array<T, 16> e_{};
};

using RealMatN = MatN<double>;
using ComplexMatN = MatN<Complex>;

/// Gaussian elimination with partial pivoting. Throws SingularMatrix when a
/// pivot falls below 1e-12 relative to the largest entry of the input.
template <typename T>
MatN<T> invert(const MatN<T>& m) {
    const int n = m.size();
    const double scale = std::max(m.max_abs(), 1e-300);

    // augmented [A | I]
    std::array<std::array<T, 8>, 4> a{};
    for (int r = 0; r < n; ++r) {
        for (int c = 0; c < n; ++c) a[r][c] = m(r, c);
        a[r][n + r] = T(1);
    }

    for (int col = 0; col < n; ++col) {
        int piv = col;
        for (int r = col + 1; r < n; ++r)
            if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
        if (std::abs(a[piv][col]) < 1e-12 * scale)
            throw SingularMatrix("invert: pivot below threshold");
        if (piv != col) std::swap(a[piv], a[col]);

        const T inv_p = T(1) / a[col][col];
        for (int c = 0; c < 2 * n; ++c) a[col][c] *= inv_p;
        for (int r = 0; r < n; ++r) {
            if (r == col) continue;
            const T f = a[r][col];
            if (f == T{}) continue;
            for (int c = 0; c < 2 * n; ++c) a[r][c] -= f * a[col][c];
        }
    }

    MatN<T> x(n);
    for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c) x(r, c) = a[r][n + c];
    return x;
}

/// Cheap condition estimate in the infinity norm.
template <typename T>
double condition_estimate(const MatN<T>& m) {
    try {
        return m.inf_norm() * invert(m).inf_norm();
    } catch (const SingularMatrix&) {
        return std::numeric_limits<double>::infinity();
    }
}

struct Eig2 {
    std::array<double, 2> values;   // ascending
    std::array<Vec2, 2> vectors;    // orthonormal
};

/// Closed-form spectral decomposition of a Hermitian 2x2 matrix.
inline Eig2 eig_hermitian_2x2(const Mat2& m) {
    if (m.hermiticity_defect() > 1e-12)
        throw NotHermitian("eig_hermitian_2x2: matrix is not Hermitian");

    const double a = m(0, 0).real();
    const double d = m(1, 1).real();
    const Complex b = m(0, 1);
    const double mean = 0.5 * (a + d);
    const double disc = std::hypot(0.5 * (a - d), std::abs(b));

    Eig2 out;
    out.values = {mean - disc, mean + disc};

    if (std::abs(b) < 1e-300 * std::max(1.0, std::abs(a) + std::abs(d)) ||
        disc == 0.0) {
        if (a <= d) {
            out.vectors = {Vec2{1.0, 0.0}, Vec2{0.0, 1.0}};
        } else {
            out.vectors = {Vec2{0.0, 1.0}, Vec2{1.0, 0.0}};
        }
        return out;
    }

    for (int i = 0; i < 2; ++i) {
        Vec2 v{b, Complex(out.values[i] - a)};
        const double nrm = v.norm();
        out.vectors[i] = (1.0 / nrm) * v;
    }
    return out;
}

/// Generalized inverse square root of a Hermitian PSD matrix: eigenvalues
/// above floor (relative to the largest eigenvalue) map to lambda^(-1/2),
/// the rest map to zero.
inline Mat2 psd_inv_sqrt(const Mat2& m, double floor = 1e-12) {
    const Eig2 e = eig_hermitian_2x2(m);
    if (e.values[0] < -1e-9)
        throw NegativeEigenvalue("psd_inv_sqrt: eigenvalue below -1e-9");

    const double lmax = std::max(e.values[1], 0.0);
    Mat2 out = Mat2::zero();
    for (int i = 0; i < 2; ++i) {
        const double lam = std::max(e.values[i], 0.0);
        if (lam > floor * lmax && lam > 0.0)
            out = out + Complex(1.0 / std::sqrt(lam)) *
                            Mat2::outer(e.vectors[i], e.vectors[i]);
    }
    return out;
}

/// True when psd_inv_sqrt would drop an eigenvalue (rank-deficient input).
inline bool psd_rank_deficient(const Mat2& m, double floor = 1e-12) {
    const Eig2 e = eig_hermitian_2x2(m);
    const double lmax = std::max(e.values[1], 0.0);
    return std::max(e.values[0], 0.0) <= floor * lmax;
}

}  // namespace povmprep

#pragma once
// The metric Lie group R^2 x|_A R: group law, the matrix exponential e^{zA},
// the invariant frames and the canonical left-invariant metric.

#include <array>
#include <cmath>
#include <cstddef>
#include <string>

#include "sdgeom/error.hpp"

namespace sdgeom {

// ---------------------------------------------------------------------------
// Small fixed-size linear algebra
// ---------------------------------------------------------------------------

using Vec3 = std::array<double, 3>;
using Mat3 = std::array<std::array<double, 3>, 3>;

struct Vec2 {
    double x = 0.0;
    double y = 0.0;
};

// Plain 2x2 real matrix, row-major.
struct Mat2 {
    double a11 = 0.0, a12 = 0.0, a21 = 0.0, a22 = 0.0;

    static constexpr Mat2 identity() { return {1.0, 0.0, 0.0, 1.0}; }

    [[nodiscard]] constexpr double det() const { return a11 * a22 - a12 * a21; }
    [[nodiscard]] constexpr double trace() const { return a11 + a22; }
    [[nodiscard]] constexpr Mat2 transposed() const { return {a11, a21, a12, a22}; }
    [[nodiscard]] double frobenius() const {
        return std::sqrt(a11 * a11 + a12 * a12 + a21 * a21 + a22 * a22);
    }

    [[nodiscard]] constexpr Vec2 operator*(Vec2 v) const {
        return {a11 * v.x + a12 * v.y, a21 * v.x + a22 * v.y};
    }
    [[nodiscard]] constexpr Mat2 operator*(const Mat2& o) const {
        return {a11 * o.a11 + a12 * o.a21, a11 * o.a12 + a12 * o.a22,
                a21 * o.a11 + a22 * o.a21, a21 * o.a12 + a22 * o.a22};
    }
    [[nodiscard]] constexpr Mat2 operator+(const Mat2& o) const {
        return {a11 + o.a11, a12 + o.a12, a21 + o.a21, a22 + o.a22};
    }
    [[nodiscard]] constexpr Mat2 operator-(const Mat2& o) const {
        return {a11 - o.a11, a12 - o.a12, a21 - o.a21, a22 - o.a22};
    }
    [[nodiscard]] constexpr Mat2 operator*(double s) const {
        return {a11 * s, a12 * s, a21 * s, a22 * s};
    }
    friend constexpr bool operator==(const Mat2&, const Mat2&) = default;
};

// ---------------------------------------------------------------------------
// Matrix2: the matrix A defining the group and its metric
// ---------------------------------------------------------------------------

// Entries of A = [[a, b], [c, d]]. Construction enforces trace(A) >= 0 by
// replacing A with -A (an orientation change of the group); `flipped()`
// records whether that happened.
class Matrix2 {
public:
    constexpr Matrix2() = default;

    Matrix2(double a, double b, double c, double d) {
        if (!std::isfinite(a) || !std::isfinite(b) || !std::isfinite(c) || !std::isfinite(d)) {
            throw Error(ErrorKind::invalid_argument, "Matrix2 entries must be finite");
        }
        if (a + d < 0.0) {
            a = -a;
            b = -b;
            c = -c;
            d = -d;
            flipped_ = true;
        }
        a_ = a;
        b_ = b;
        c_ = c;
        d_ = d;
    }

    explicit Matrix2(const Mat2& m) : Matrix2(m.a11, m.a12, m.a21, m.a22) {}

    static Matrix2 nil3() { return {0.0, 1.0, 0.0, 0.0}; }
    static Matrix2 hyperbolic() { return {1.0, 0.0, 0.0, 1.0}; }
    static Matrix2 euclidean() { return {0.0, 0.0, 0.0, 0.0}; }
    // [[1, -b], [b, 1]]: the identity plus a rotation generator. Every member
    // is a metric on hyperbolic space (curvature -1).
    static Matrix2 constant_curvature(double b) { return {1.0, -b, b, 1.0}; }

    [[nodiscard]] constexpr double a() const { return a_; }
    [[nodiscard]] constexpr double b() const { return b_; }
    [[nodiscard]] constexpr double c() const { return c_; }
    [[nodiscard]] constexpr double d() const { return d_; }
    [[nodiscard]] constexpr bool flipped() const { return flipped_; }
    [[nodiscard]] constexpr double trace() const { return a_ + d_; }
    [[nodiscard]] constexpr Mat2 mat() const { return {a_, b_, c_, d_}; }

    friend constexpr bool operator==(const Matrix2&, const Matrix2&) = default;

private:
    double a_ = 0.0, b_ = 0.0, c_ = 0.0, d_ = 0.0;
    bool flipped_ = false;
};

// ---------------------------------------------------------------------------
// Points and tangent vectors
// ---------------------------------------------------------------------------

struct GroupPoint {
    double x1 = 0.0, x2 = 0.0, x3 = 0.0;

    [[nodiscard]] constexpr Vec3 coords() const { return {x1, x2, x3}; }
    static constexpr GroupPoint from(const Vec3& v) { return {v[0], v[1], v[2]}; }
    friend constexpr bool operator==(const GroupPoint&, const GroupPoint&) = default;
};

// Tangent vector components in a fixed basis. The tag keeps frame components
// and coordinate components from being mixed up.
template <class Tag>
struct BasisVector {
    Vec3 c{};

    constexpr BasisVector() = default;
    constexpr BasisVector(double c1, double c2, double c3) : c{c1, c2, c3} {}
    constexpr explicit BasisVector(const Vec3& v) : c(v) {}

    constexpr double& operator[](std::size_t i) { return c[i]; }
    constexpr double operator[](std::size_t i) const { return c[i]; }

    friend constexpr BasisVector operator+(BasisVector u, const BasisVector& v) {
        for (std::size_t i = 0; i < 3; ++i) u.c[i] += v.c[i];
        return u;
    }
    friend constexpr BasisVector operator-(BasisVector u, const BasisVector& v) {
        for (std::size_t i = 0; i < 3; ++i) u.c[i] -= v.c[i];
        return u;
    }
    friend constexpr BasisVector operator*(double s, BasisVector u) {
        for (auto& x : u.c) x *= s;
        return u;
    }
    friend constexpr bool operator==(const BasisVector&, const BasisVector&) = default;
};

struct FrameTag {};
struct CoordTag {};

// Components in the orthonormal left-invariant frame {E1, E2, E3}.
using FrameVector = BasisVector<FrameTag>;
// Components in the coordinate frame {d/dx1, d/dx2, d/dx3}.
using CoordVector = BasisVector<CoordTag>;

inline double frame_dot(const FrameVector& u, const FrameVector& v) {
    return u[0] * v[0] + u[1] * v[1] + u[2] * v[2];
}
inline double frame_norm(const FrameVector& u) { return std::sqrt(frame_dot(u, u)); }

struct ExpAz {
    Mat2 value;
    double z = 0.0;
};

// Inner products of coordinate basis vectors at a point.
struct MetricTensor {
    Mat3 g{};

    [[nodiscard]] double inner(const CoordVector& u, const CoordVector& v) const {
        double s = 0.0;
        for (std::size_t i = 0; i < 3; ++i)
            for (std::size_t j = 0; j < 3; ++j) s += u[i] * g[i][j] * v[j];
        return s;
    }
    [[nodiscard]] double norm(const CoordVector& u) const { return std::sqrt(inner(u, u)); }
    [[nodiscard]] double det() const {
        return g[0][0] * (g[1][1] * g[2][2] - g[1][2] * g[2][1]) -
               g[0][1] * (g[1][0] * g[2][2] - g[1][2] * g[2][0]) +
               g[0][2] * (g[1][0] * g[2][1] - g[1][1] * g[2][0]);
    }
};

// ---------------------------------------------------------------------------
// Matrix exponential
// ---------------------------------------------------------------------------

namespace detail {

// cosh(sqrt(w)) and sinh(sqrt(w))/sqrt(w), continued analytically to w < 0.
// Both are entire in w; the Taylor branch covers the repeated-eigenvalue
// neighbourhood where the closed forms lose digits.
struct CoshSinhc {
    double ch;
    double shc;
};

inline CoshSinhc cosh_sinhc(double w) {
    if (std::abs(w) < 1e-4) {
        double ch = 0.0, shc = 0.0, term = 1.0;
        for (int k = 0; k < 8; ++k) {
            ch += term;
            shc += term / (2.0 * k + 1.0);
            term *= w / ((2.0 * k + 1.0) * (2.0 * k + 2.0));
        }
        return {ch, shc};
    }
    if (w > 0.0) {
        const double s = std::sqrt(w);
        return {std::cosh(s), std::sinh(s) / s};
    }
    const double s = std::sqrt(-w);
    return {std::cos(s), std::sin(s) / s};
}

}  // namespace detail

// e^{zA} in closed form. With m = trace/2 and B = A - mI we have B^2 = delta*I,
// delta = ((a-d)/2)^2 + bc, so e^{zA} = e^{mz} (cosh(z sqrt(delta)) I
// + z sinhc(z sqrt(delta)) B), with the trigonometric form for delta < 0.
inline ExpAz exp_zA(const Mat2& A, double z) {
    const double m = 0.5 * (A.a11 + A.a22);
    const double h = 0.5 * (A.a11 - A.a22);
    const double delta = h * h + A.a12 * A.a21;
    const auto [ch, shc] = detail::cosh_sinhc(delta * z * z);
    const double em = std::exp(m * z);
    const double zs = z * shc;
    Mat2 r{ch + zs * h, zs * A.a12, zs * A.a21, ch - zs * h};
    return {r * em, z};
}

inline ExpAz exp_zA(const Matrix2& A, double z) { return exp_zA(A.mat(), z); }

// ---------------------------------------------------------------------------
// Group operations
// ---------------------------------------------------------------------------

inline GroupPoint multiply(const GroupPoint& p, const GroupPoint& q, const Matrix2& A) {
    const Vec2 r = exp_zA(A, p.x3).value * Vec2{q.x1, q.x2};
    return {p.x1 + r.x, p.x2 + r.y, p.x3 + q.x3};
}

inline GroupPoint inverse(const GroupPoint& p, const Matrix2& A) {
    const Vec2 r = exp_zA(A, -p.x3).value * Vec2{p.x1, p.x2};
    return {-r.x, -r.y, -p.x3};
}

// The isometry (x1, x2, x3) -> (-x1, -x2, x3).
inline GroupPoint rotate_half_turn(const GroupPoint& p) { return {-p.x1, -p.x2, p.x3}; }

// Differential of left translation by g, acting on coordinate components.
// Left translation is affine in coordinates with linear part diag(e^{g3 A}, 1).
inline CoordVector left_translate_vector(const GroupPoint& g, const CoordVector& v,
                                         const Matrix2& A) {
    const Vec2 r = exp_zA(A, g.x3).value * Vec2{v[0], v[1]};
    return {r.x, r.y, v[2]};
}

// ---------------------------------------------------------------------------
// Frames and metric
// ---------------------------------------------------------------------------

struct Frame {
    CoordVector e1, e2, e3;

    [[nodiscard]] const CoordVector& operator[](std::size_t i) const {
        return i == 0 ? e1 : (i == 1 ? e2 : e3);
    }
};

// Left-invariant frame: E1, E2 are the columns of e^{x3 A}, E3 = d/dx3.
inline Frame left_frame_at(const GroupPoint& p, const Matrix2& A) {
    const Mat2 M = exp_zA(A, p.x3).value;
    return {{M.a11, M.a21, 0.0}, {M.a12, M.a22, 0.0}, {0.0, 0.0, 1.0}};
}

// Right-invariant frame F1 = d/dx1, F2 = d/dx2,
// F3 = (a x1 + b x2) d/dx1 + (c x1 + d x2) d/dx2 + d/dx3.
inline Frame right_frame_at(const GroupPoint& p, const Matrix2& A) {
    return {{1.0, 0.0, 0.0},
            {0.0, 1.0, 0.0},
            {A.a() * p.x1 + A.b() * p.x2, A.c() * p.x1 + A.d() * p.x2, 1.0}};
}

// Upper-left 2x2 block of the coordinate metric at height x3:
// (e^{-x3 A})^T e^{-x3 A}.
inline Mat2 metric_block(double x3, const Matrix2& A) {
    const Mat2 N = exp_zA(A, -x3).value;
    return N.transposed() * N;
}

// d/dx3 of metric_block: -(e^{-x3 A})^T (A + A^T) e^{-x3 A}.
inline Mat2 metric_block_derivative(double x3, const Matrix2& A) {
    const Mat2 N = exp_zA(A, -x3).value;
    const Mat2 S = A.mat() + A.mat().transposed();
    return (N.transposed() * S * N) * -1.0;
}

inline MetricTensor metric_at(const GroupPoint& p, const Matrix2& A) {
    const Mat2 G = metric_block(p.x3, A);
    MetricTensor m;
    m.g = {{{G.a11, G.a12, 0.0}, {G.a21, G.a22, 0.0}, {0.0, 0.0, 1.0}}};
    return m;
}

inline FrameVector coord_to_frame(const CoordVector& v, const GroupPoint& p, const Matrix2& A) {
    const Vec2 r = exp_zA(A, -p.x3).value * Vec2{v[0], v[1]};
    return {r.x, r.y, v[2]};
}

inline CoordVector frame_to_coord(const FrameVector& v, const GroupPoint& p, const Matrix2& A) {
    const Vec2 r = exp_zA(A, p.x3).value * Vec2{v[0], v[1]};
    return {r.x, r.y, v[2]};
}

// ---------------------------------------------------------------------------
// Constants of the group
// ---------------------------------------------------------------------------

struct GroupConstants {
    double H0 = 0.0;  // mean curvature of the leaves R^2 x {x3}, = trace/2
    bool unimodular = false;
    double trace = 0.0;
};

inline GroupConstants group_constants(const Matrix2& A) {
    const double t = A.trace();
    return {0.5 * t, std::abs(t) <= 1e-14, t};
}

// Beyond this the metric determinant e^{-2 x3 tr A} approaches under/overflow.
inline bool metric_in_safe_range(const GroupPoint& p, const Matrix2& A, double limit = 30.0) {
    return std::abs(p.x3 * A.trace()) <= limit;
}

}  // namespace sdgeom

#pragma once
// Reference computations used by the tests. Nothing here calls the library's
// own closed forms; each oracle is an independent route to the same number.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <functional>

#include "sdgeom/group.hpp"
#include "sdgeom/rng.hpp"

namespace oracle {

using sdgeom::Mat2;
using sdgeom::Vec3;

// e^{M} by scaling and squaring of a long-double Taylor series.
inline Mat2 expm(const Mat2& m) {
    using LD = long double;
    LD a = m.a11, b = m.a12, c = m.a21, d = m.a22;
    const LD norm = std::sqrt(a * a + b * b + c * c + d * d);
    int squarings = 0;
    LD scale = 1;
    while (norm * scale > 0.25L) {
        scale *= 0.5L;
        ++squarings;
    }
    a *= scale, b *= scale, c *= scale, d *= scale;
    LD r11 = 1, r12 = 0, r21 = 0, r22 = 1;
    LD t11 = 1, t12 = 0, t21 = 0, t22 = 1;
    for (int k = 1; k < 30; ++k) {
        const LD n11 = (t11 * a + t12 * c) / k, n12 = (t11 * b + t12 * d) / k;
        const LD n21 = (t21 * a + t22 * c) / k, n22 = (t21 * b + t22 * d) / k;
        t11 = n11, t12 = n12, t21 = n21, t22 = n22;
        r11 += t11, r12 += t12, r21 += t21, r22 += t22;
    }
    for (int s = 0; s < squarings; ++s) {
        const LD n11 = r11 * r11 + r12 * r21, n12 = r11 * r12 + r12 * r22;
        const LD n21 = r21 * r11 + r22 * r21, n22 = r21 * r12 + r22 * r22;
        r11 = n11, r12 = n12, r21 = n21, r22 = n22;
    }
    return {static_cast<double>(r11), static_cast<double>(r12), static_cast<double>(r21), static_cast<double>(r22)};
}

inline double max_abs(const Mat2& m) {
    return std::max({std::abs(m.a11), std::abs(m.a12), std::abs(m.a21), std::abs(m.a22)});
}

// Random matrix with entries uniform in [-r, r] after scaling to Frobenius norm <= r.
inline Mat2 random_matrix(sdgeom::Rng& rng, double r) {
    Mat2 m{rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)};
    const double f = m.frobenius();
    const double target = r * rng.uniform();
    return f > 0 ? m * (target / f) : m;
}

// Symmetric 4-point stencil, O(h^4).
inline double derivative(const std::function<double(double)>& f, double x, double h) {
    return (-f(x + 2 * h) + 8 * f(x + h) - 8 * f(x - h) + f(x - 2 * h)) / (12 * h);
}

// Metric in coordinates built directly from the group law: the left frame at
// p is the image of the identity frame under d(L_p), computed here by
// differentiating the multiplication numerically, then g = (F F^T)^{-1}.
inline std::array<Vec3, 3> left_frame_by_differentiation(const sdgeom::GroupPoint& p, const sdgeom::Matrix2& A,
                                                        double h = 1e-5) {
    std::array<Vec3, 3> cols{};
    for (int j = 0; j < 3; ++j) {
        for (int i = 0; i < 3; ++i) {
            auto comp = [&](double t) {
                sdgeom::GroupPoint q{};
                (j == 0 ? q.x1 : j == 1 ? q.x2 : q.x3) = t;
                const auto r = sdgeom::multiply(p, q, A);
                return r.coords()[static_cast<std::size_t>(i)];
            };
            cols[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)] = derivative(comp, 0.0, h);
        }
    }
    return cols;
}

}  // namespace oracle

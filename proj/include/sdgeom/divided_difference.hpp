#pragma once
// Divided differences of exp, used for exact integrals of e^{-t x3} over
// triangles with linearly interpolated heights.
//
// Hermite-Genocchi: exp[y0..yn] is the integral of exp(sum s_i y_i) over the
// standard n-simplex, so the mean of e^{L} over a triangle on which L is
// linear with vertex values y0, y1, y2 equals 2 exp[y0, y1, y2].

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <span>

namespace sdgeom {

// Complete homogeneous symmetric polynomials h_0..h_K of the given values.
template <std::size_t K>
std::array<double, K + 1> complete_homogeneous(std::span<const double> x) {
    std::array<double, K + 1> h{};
    h[0] = 1.0;
    for (std::size_t k = 1; k <= K; ++k) h[k] = 0.0;
    for (double xi : x)
        for (std::size_t k = 1; k <= K; ++k) h[k] += xi * h[k - 1];
    return h;
}

namespace detail {

// exp[y0..yn] = e^{ybar} * sum_m h_m(y - ybar) / (m + n)!; accurate while the
// spread around the mean is O(1).
inline double exp_dd_series(std::span<const double> y) {
    const std::size_t n = y.size() - 1;
    double mean = 0.0;
    for (double v : y) mean += v;
    mean /= static_cast<double>(y.size());
    std::array<double, 4> c{};
    for (std::size_t i = 0; i < y.size(); ++i) c[i] = y[i] - mean;
    const auto h = complete_homogeneous<48>(std::span<const double>(c.data(), y.size()));
    double fact = 1.0;
    for (std::size_t k = 2; k <= n; ++k) fact *= static_cast<double>(k);
    double sum = 0.0;
    for (std::size_t m = 0; m <= 48; ++m) {
        const double term = h[m] / fact;
        sum += term;
        fact *= static_cast<double>(m + n + 1);
    }
    return std::exp(mean) * sum;
}

inline double exp_dd_sorted(const double* y, std::size_t count) {
    if (count == 1) return std::exp(y[0]);
    const double spread = y[count - 1] - y[0];
    if (spread <= 2.0) return exp_dd_series(std::span<const double>(y, count));
    return (exp_dd_sorted(y + 1, count - 1) - exp_dd_sorted(y, count - 1)) / spread;
}

}  // namespace detail

// exp[y0, ..., yn] for 1 to 4 nodes; repeated nodes are allowed.
inline double exp_divided_difference(std::span<const double> nodes) {
    std::array<double, 4> y{};
    std::copy(nodes.begin(), nodes.end(), y.begin());
    std::sort(y.begin(), y.begin() + static_cast<std::ptrdiff_t>(nodes.size()));
    return detail::exp_dd_sorted(y.data(), nodes.size());
}

// Mean over a triangle of F(L) where L is linear with vertex values h and
// F(s) = (1 - e^{-t s}) / t (F(s) = s at t = 0), the x3-antiderivative of the
// volume density e^{-t x3}.
inline double mean_volume_antiderivative(const std::array<double, 3>& h, double t) {
    double hmax = 0.0;
    for (double v : h) hmax = std::max(hmax, std::abs(v));
    if (std::abs(t) * hmax <= 1.0) {
        // sum_{k>=1} 2 (-t)^{k-1} h_k(h) / (k+2)!
        const auto hk = complete_homogeneous<40>(h);
        double sum = 0.0, tp = 1.0, fact = 6.0;
        for (std::size_t k = 1; k <= 40; ++k) {
            const double term = 2.0 * tp * hk[k] / fact;
            sum += term;
            if (k > 3 && std::abs(term) <= 1e-18 * std::abs(sum)) break;
            tp *= -t;
            fact *= static_cast<double>(k + 3);
        }
        return sum;
    }
    const std::array<double, 3> y{-t * h[0], -t * h[1], -t * h[2]};
    return (1.0 - 2.0 * exp_divided_difference(y)) / t;
}

// d/dh_i of mean_volume_antiderivative: the triangle mean of b_i e^{-t L},
// which is 2 exp[y0, y1, y2, y_i] with y = -t h.
inline double mean_volume_antiderivative_grad(const std::array<double, 3>& h, double t,
                                              std::size_t i) {
    const std::array<double, 4> y{-t * h[0], -t * h[1], -t * h[2], -t * h[i]};
    return 2.0 * exp_divided_difference(y);
}

}  // namespace sdgeom

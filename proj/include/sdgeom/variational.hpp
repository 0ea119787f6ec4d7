#pragma once
// Barrier experiment: annular graph meshes spanning two horizontal circles
// inside the slab 0 <= x3 <= eps, minimized for T = Area + 2 H0 Volume.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstddef>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include "sdgeom/error.hpp"
#include "sdgeom/group.hpp"
#include "sdgeom/surface.hpp"

namespace sdgeom {

struct SlabConfig {
    double eps = 0.1;
    Matrix2 A;
    double H0 = 0.0;

    static SlabConfig make(const Matrix2& A, double eps) {
        if (!(eps > 0.0)) throw Error(ErrorKind::invalid_argument, "slab height must be > 0");
        return {eps, A, group_constants(A).H0};
    }
};

// S(height, radius) = {x1^2 + x2^2 = radius^2, x3 = height}
struct Circle {
    double radius = 1.0;
    double height = 0.0;
};

struct BoundaryCircles {
    Circle inner;
    Circle outer;
    int n_seg = 64;
};

enum class RadialSpacing { uniform, geometric };

// Structured annulus between the two circles. Heights are linear in the
// radius; ring radii are spaced uniformly or geometrically (the latter keeps
// triangles near the inner circle well shaped for large radius ratios).
// Vertex (ring j, segment k) has index j * n_seg + k; ring 0 is the inner
// circle. Every quad is split along the same diagonal and faces are
// counter-clockwise seen from +x3.
inline TriMesh make_annulus_mesh(const BoundaryCircles& c, int radial_rings,
                                 RadialSpacing spacing = RadialSpacing::geometric) {
    if (radial_rings < 1) throw Error(ErrorKind::invalid_argument, "radial_rings must be >= 1");
    if (c.n_seg < 8) throw Error(ErrorKind::invalid_argument, "n_seg must be >= 8");
    if (!(c.inner.radius > 0.0) || !(c.outer.radius > 0.0))
        throw Error(ErrorKind::invalid_argument, "radii must be positive");
    if (c.inner.radius >= c.outer.radius)
        throw Error(ErrorKind::invalid_argument, "inner radius must be smaller than outer radius");

    const auto n = static_cast<std::size_t>(c.n_seg);
    const auto rings = static_cast<std::size_t>(radial_rings);
    const double r0 = c.inner.radius, r1 = c.outer.radius;
    std::vector<GroupPoint> verts;
    verts.reserve(n * (rings + 1));
    for (std::size_t j = 0; j <= rings; ++j) {
        const double s = static_cast<double>(j) / static_cast<double>(rings);
        double r = spacing == RadialSpacing::uniform ? r0 + s * (r1 - r0) : r0 * std::pow(r1 / r0, s);
        if (j == 0) r = r0;
        if (j == rings) r = r1;
        const double height =
            j == 0 ? c.inner.height
                   : (j == rings ? c.outer.height
                                 : c.inner.height + (c.outer.height - c.inner.height) * (r - r0) / (r1 - r0));
        for (std::size_t k = 0; k < n; ++k) {
            const double th = 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n);
            verts.push_back({r * std::cos(th), r * std::sin(th), height});
        }
    }
    std::vector<Face> faces;
    faces.reserve(2 * n * rings);
    for (std::size_t j = 0; j < rings; ++j) {
        for (std::size_t k = 0; k < n; ++k) {
            const std::size_t v00 = j * n + k, v01 = j * n + (k + 1) % n;
            const std::size_t v10 = (j + 1) * n + k, v11 = (j + 1) * n + (k + 1) % n;
            faces.push_back({v00, v10, v11});
            faces.push_back({v00, v11, v01});
        }
    }
    return TriMesh::build(std::move(verts), std::move(faces));
}

inline double functional_T(const TriMesh& m, const SlabConfig& cfg,
                           Quadrature q = Quadrature::barycenter) {
    return mesh_area(m, cfg.A, q) + 2.0 * cfg.H0 * mesh_volume_below(m, cfg.A);
}

namespace detail {

// Per-face contributions to functional_T, so that energy changes can be summed
// face by face instead of differencing two large totals.
inline std::vector<double> functional_T_faces(const TriMesh& m, const SlabConfig& cfg, Quadrature q) {
    const double sign = graph_orientation(m);
    const double t = cfg.A.trace();
    std::vector<double> out(m.num_faces());
    for (std::size_t fi = 0; fi < m.num_faces(); ++fi) {
        const auto p = face_coords(m, m.faces[fi]);
        const double area = face_area(p, cfg.A, q, nullptr);
        const std::array<double, 3> h{p[0][2], p[1][2], p[2][2]};
        out[fi] = area + 2.0 * cfg.H0 * sign * projected_area(p) * mean_volume_antiderivative(h, t);
    }
    return out;
}

}  // namespace detail

// Coordinate gradient of functional_T; boundary vertices are pinned and get 0.
inline std::vector<Vec3> grad_T(const TriMesh& m, const SlabConfig& cfg,
                                Quadrature q = Quadrature::barycenter) {
    auto g = mesh_area_gradient(m, cfg.A, q);
    const auto gv = mesh_volume_gradient(m, cfg.A);
    for (std::size_t v = 0; v < g.size(); ++v) {
        if (m.boundary[v]) {
            g[v] = {0.0, 0.0, 0.0};
            continue;
        }
        for (std::size_t k = 0; k < 3; ++k) g[v][k] += 2.0 * cfg.H0 * gv[v][k];
    }
    return g;
}

// ---------------------------------------------------------------------------
// Minimization
// ---------------------------------------------------------------------------

// T is accumulated from accepted face-wise decrements, so the logged sequence
// is non-increasing in floating point as well.
struct IterationRecord {
    int iter = 0;
    double T = 0.0;
    double grad_norm = 0.0;
    double flatness = 0.0;
};

struct HStats {
    double mean = 0.0;
    double max_dev = 0.0;  // max |H - reference| over interior vertices
    double min = 0.0;
    double max = 0.0;
};

struct MinimizeReport {
    double T = 0.0;
    double area = 0.0;
    double volume = 0.0;
    double grad_sup = 0.0;  // sup over free vertices of |projected dT/dx3| / mass
    HStats H;
    double flatness = 0.0;
    double min_height = 0.0;
    double max_height = 0.0;
    int iterations = 0;
    bool converged = false;
    bool monotone = true;
    bool slab_confined = true;
    bool boundary_fixed = true;
    double tol_grad = 0.0;
    // line-search parameters, echoed for reproducibility
    double armijo_shrink = 0.5;
    double armijo_slope = 1e-4;
    double initial_step = 1.0;
    std::vector<IterationRecord> log;
};

struct MinimizeOptions {
    double tol_grad = 0.0;  // <= 0 selects 1e-6 * T(initial)
    int max_iter = 500;
    // flatness = max |x3 - flat_target| over vertices with r <= probe_radius
    double probe_radius = std::numeric_limits<double>::infinity();
    std::optional<double> flat_target;  // default: slab height eps
    Quadrature quadrature = Quadrature::barycenter;
};

inline double flatness(const TriMesh& m, double probe_radius, double target) {
    double f = 0.0;
    bool any = false;
    for (const auto& v : m.vertices) {
        if (v.x1 * v.x1 + v.x2 * v.x2 > probe_radius * probe_radius) continue;
        any = true;
        f = std::max(f, std::abs(v.x3 - target));
    }
    if (!any) throw Error(ErrorKind::precondition, "probe region contains no vertices");
    return f;
}

inline HStats mean_curvature_stats(const TriMesh& m, const Matrix2& A, double reference,
                                   Quadrature q = Quadrature::barycenter) {
    const auto curv = discrete_mean_curvature(m, A, q);
    HStats s;
    s.min = std::numeric_limits<double>::infinity();
    s.max = -s.min;
    std::size_t n = 0;
    for (const auto& c : curv) {
        if (!c.interior) continue;
        ++n;
        s.mean += c.H;
        s.max_dev = std::max(s.max_dev, std::abs(c.H - reference));
        s.min = std::min(s.min, c.H);
        s.max = std::max(s.max, c.H);
    }
    if (n > 0) s.mean /= static_cast<double>(n);
    return s;
}

namespace detail {

inline std::string format_diag(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6e", x);
    return buf;
}

// Euclidean P1 stiffness of the x1x2-projection restricted to free vertices:
// a fixed, mesh-scaled approximation of the Hessian of T in the heights.
inline Eigen::SparseMatrix<double> projected_stiffness(const TriMesh& m,
                                                       const std::vector<long>& free_index,
                                                       long n_free) {
    std::vector<Eigen::Triplet<double>> trip;
    for (const auto& f : m.faces) {
        std::array<Vec3, 3> p;
        for (std::size_t i = 0; i < 3; ++i) p[i] = {m.vertices[f[i]].x1, m.vertices[f[i]].x2, 0.0};
        const double area = std::abs(projected_area(p));
        for (std::size_t c = 0; c < 3; ++c) {
            const std::size_t i = (c + 1) % 3, j = (c + 2) % 3;
            const Vec3 u = sub(p[i], p[c]), w = sub(p[j], p[c]);
            const double cot = dot(u, w) / (2.0 * area);
            const double wgt = 0.5 * cot;
            const long a = free_index[f[i]], b = free_index[f[j]];
            if (a >= 0) trip.emplace_back(a, a, wgt);
            if (b >= 0) trip.emplace_back(b, b, wgt);
            if (a >= 0 && b >= 0) {
                trip.emplace_back(a, b, -wgt);
                trip.emplace_back(b, a, -wgt);
            }
        }
    }
    Eigen::SparseMatrix<double> K(n_free, n_free);
    K.setFromTriplets(trip.begin(), trip.end());
    return K;
}

}  // namespace detail

// Projected descent on the interior heights (x1, x2 stay fixed, so the mesh
// remains a graph) with Armijo backtracking. Each trial point is clamped to
// the slab [0, eps]. The search direction is the gradient preconditioned by
// the projected stiffness matrix, falling back to the mass-scaled gradient
// when that direction fails to produce descent.
inline std::pair<TriMesh, MinimizeReport> minimize(TriMesh m, const SlabConfig& cfg,
                                                   const MinimizeOptions& opt = {}) {
    detail::graph_orientation(m);
    const std::size_t nv = m.num_vertices();
    std::vector<long> free_index(nv, -1);
    std::vector<std::size_t> free_vertices;
    for (std::size_t v = 0; v < nv; ++v) {
        if (m.boundary[v]) continue;
        free_index[v] = static_cast<long>(free_vertices.size());
        free_vertices.push_back(v);
    }
    const auto n_free = static_cast<long>(free_vertices.size());
    const std::vector<GroupPoint> pinned = m.vertices;

    for (auto v : free_vertices) m.vertices[v].x3 = std::clamp(m.vertices[v].x3, 0.0, cfg.eps);

    MinimizeReport rep;
    const double target = opt.flat_target.value_or(cfg.eps);
    double T = functional_T(m, cfg, opt.quadrature);
    rep.tol_grad = opt.tol_grad > 0.0 ? opt.tol_grad : 1e-6 * T;

    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver;
    if (n_free > 0) {
        solver.compute(detail::projected_stiffness(m, free_index, n_free));
        if (solver.info() != Eigen::Success)
            throw Error(ErrorKind::degenerate, "stiffness factorization failed");
    }

    auto projected = [&](const std::vector<Vec3>& g, std::size_t v) {
        const double x = m.vertices[v].x3, gv = g[v][2];
        if ((x <= 0.0 && gv > 0.0) || (x >= cfg.eps && gv < 0.0)) return 0.0;
        return gv;
    };

    for (int iter = 0;; ++iter) {
        const auto g = grad_T(m, cfg, opt.quadrature);
        const auto op = build_cotan_operator(m, cfg.A);
        double sup = 0.0;
        for (auto v : free_vertices) sup = std::max(sup, std::abs(projected(g, v)) / op.mass[v]);
        rep.log.push_back({iter, T, sup, flatness(m, opt.probe_radius, target)});
        rep.iterations = iter;
        rep.grad_sup = sup;
        if (sup <= rep.tol_grad) {
            rep.converged = true;
            break;
        }
        if (iter >= opt.max_iter) break;

        Eigen::VectorXd rhs(n_free);
        for (long i = 0; i < n_free; ++i) rhs[i] = projected(g, free_vertices[static_cast<std::size_t>(i)]);
        const Eigen::VectorXd newton = solver.solve(rhs);
        const auto faces_T = detail::functional_T_faces(m, cfg, opt.quadrature);

        bool accepted = false;
        for (int attempt = 0; attempt < 2 && !accepted; ++attempt) {
            std::vector<double> dir(static_cast<std::size_t>(n_free));
            for (long i = 0; i < n_free; ++i) {
                const auto v = free_vertices[static_cast<std::size_t>(i)];
                dir[static_cast<std::size_t>(i)] = attempt == 0 ? -newton[i] : -rhs[i] / op.mass[v];
            }
            double step = rep.initial_step;
            for (int ls = 0; ls < 50; ++ls, step *= rep.armijo_shrink) {
                TriMesh trial = m;
                double slope = 0.0;
                for (long i = 0; i < n_free; ++i) {
                    const auto v = free_vertices[static_cast<std::size_t>(i)];
                    const double x = std::clamp(m.vertices[v].x3 + step * dir[static_cast<std::size_t>(i)], 0.0, cfg.eps);
                    slope += g[v][2] * (x - m.vertices[v].x3);
                    trial.vertices[v].x3 = x;
                }
                if (!(slope < 0.0)) continue;
                double dT = 0.0;
                try {
                    const auto trial_faces = detail::functional_T_faces(trial, cfg, opt.quadrature);
                    for (std::size_t fi = 0; fi < trial_faces.size(); ++fi) dT += trial_faces[fi] - faces_T[fi];
                } catch (const Error& e) {
                    if (e.kind() != ErrorKind::degenerate) throw;
                    continue;
                }
                if (dT <= rep.armijo_slope * slope && dT <= 0.0) {
                    m = std::move(trial);
                    T += dT;
                    accepted = true;
                    break;
                }
            }
        }
        if (!accepted) {
            throw Error(ErrorKind::line_search,
                        "line search failed 50 consecutive times at iteration " + std::to_string(iter) +
                            " (T = " + detail::format_diag(T) + ", projected gradient " + detail::format_diag(sup) + ")");
        }
    }

    rep.T = functional_T(m, cfg, opt.quadrature);
    rep.area = mesh_area(m, cfg.A, opt.quadrature);
    rep.volume = mesh_volume_below(m, cfg.A);
    rep.H = mean_curvature_stats(m, cfg.A, cfg.H0, opt.quadrature);
    rep.flatness = rep.log.back().flatness;
    rep.min_height = std::numeric_limits<double>::infinity();
    rep.max_height = -rep.min_height;
    for (std::size_t v = 0; v < nv; ++v) {
        const auto& p = m.vertices[v];
        rep.min_height = std::min(rep.min_height, p.x3);
        rep.max_height = std::max(rep.max_height, p.x3);
        if (!m.boundary[v] && (p.x3 < 0.0 || p.x3 > cfg.eps)) rep.slab_confined = false;
        if (m.boundary[v] && !(p == pinned[v])) rep.boundary_fixed = false;
        if (!m.boundary[v] && (p.x1 != pinned[v].x1 || p.x2 != pinned[v].x2)) rep.boundary_fixed = false;
    }
    for (std::size_t i = 1; i < rep.log.size(); ++i)
        if (rep.log[i].T > rep.log[i - 1].T) rep.monotone = false;
    return {std::move(m), rep};
}

// ---------------------------------------------------------------------------
// Flattening and area growth across a series of outer radii
// ---------------------------------------------------------------------------

struct SeriesEntry {
    double R = 0.0;
    TriMesh mesh;
};

struct GrowthRow {
    double R = 0.0;
    double flatness = 0.0;
    double area = 0.0;
    double area_over_R2 = 0.0;
};

struct GrowthReport {
    std::vector<GrowthRow> rows;
    double fitted_c = 0.0;           // least-squares Area ~ c R^2
    double fit_relative_rms = 0.0;   // RMS of (Area - c R^2) / Area
    double ratio_band = 0.0;         // max / min of Area / R^2
    bool flatness_monotone = false;  // non-increasing within the noise allowance
};

inline GrowthReport flatness_and_growth_report(const std::vector<SeriesEntry>& series,
                                               const Matrix2& A, double probe_radius,
                                               double target_height, double noise = 0.10) {
    if (series.size() < 3) throw Error(ErrorKind::invalid_argument, "need at least 3 radii");
    GrowthReport rep;
    double num = 0.0, den = 0.0;
    for (const auto& e : series) {
        GrowthRow row;
        row.R = e.R;
        row.flatness = flatness(e.mesh, probe_radius, target_height);
        row.area = mesh_area(e.mesh, A);
        row.area_over_R2 = row.area / (e.R * e.R);
        num += row.area * e.R * e.R;
        den += e.R * e.R * e.R * e.R;
        rep.rows.push_back(row);
    }
    std::sort(rep.rows.begin(), rep.rows.end(), [](const auto& a, const auto& b) { return a.R < b.R; });
    rep.fitted_c = num / den;
    double rms = 0.0, lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    for (const auto& r : rep.rows) {
        const double rel = (r.area - rep.fitted_c * r.R * r.R) / r.area;
        rms += rel * rel;
        lo = std::min(lo, r.area_over_R2);
        hi = std::max(hi, r.area_over_R2);
    }
    rep.fit_relative_rms = std::sqrt(rms / static_cast<double>(rep.rows.size()));
    rep.ratio_band = hi / lo;
    rep.flatness_monotone = true;
    for (std::size_t i = 1; i < rep.rows.size(); ++i)
        if (rep.rows[i].flatness > (1.0 + noise) * rep.rows[i - 1].flatness) rep.flatness_monotone = false;
    return rep;
}

}  // namespace sdgeom

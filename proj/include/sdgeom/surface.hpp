#pragma once
// Surfaces in R^2 x|_A R: pointwise conformal jets, and triangle meshes whose
// vertices live in group coordinates and whose edges are measured with the
// canonical metric.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "sdgeom/divided_difference.hpp"
#include "sdgeom/error.hpp"
#include "sdgeom/geometry.hpp"
#include "sdgeom/group.hpp"

namespace sdgeom {

using cplx = std::complex<double>;
using CVec3 = std::array<cplx, 3>;

// ===========================================================================
// Conformal jets
// ===========================================================================

// First-order data of a conformal immersion f at a point: f_z = sum A_k E_k.
// The unit normal is stored, not derived, so near-isotropic jets stay usable.
struct ConformalJet {
    GroupPoint point;
    CVec3 A{};
    FrameVector N{0.0, 0.0, 1.0};
    double lambda = 0.0;  // |A1|^2 + |A2|^2 + |A3|^2

    // Fills N = unit(Re f_z x Im f_z) and lambda from the components.
    static ConformalJet make(const GroupPoint& p, cplx a1, cplx a2, cplx a3) {
        ConformalJet j;
        j.point = p;
        j.A = {a1, a2, a3};
        j.lambda = std::norm(a1) + std::norm(a2) + std::norm(a3);
        const Vec3 re{a1.real(), a2.real(), a3.real()};
        const Vec3 im{a1.imag(), a2.imag(), a3.imag()};
        const FrameVector n{re[1] * im[2] - re[2] * im[1], re[2] * im[0] - re[0] * im[2],
                            re[0] * im[1] - re[1] * im[0]};
        const double len = frame_norm(n);
        if (!(len > 0.0)) throw Error(ErrorKind::degenerate, "jet has no tangent plane");
        j.N = (1.0 / len) * n;
        return j;
    }

    [[nodiscard]] double N3() const { return N[2]; }
};

inline double conformal_defect(const ConformalJet& jet) {
    return std::abs(jet.A[0] * jet.A[0] + jet.A[1] * jet.A[1] + jet.A[2] * jet.A[2]);
}

// Checks the jet invariants; returns an empty string when all hold.
inline std::string jet_violation(const ConformalJet& jet, double conformal_tol = 1e-10) {
    if (conformal_defect(jet) > conformal_tol) return "conformality defect above tolerance";
    if (std::abs(frame_norm(jet.N) - 1.0) > 1e-12) return "normal is not unit";
    const double scale = std::sqrt(jet.lambda);
    for (int part = 0; part < 2; ++part) {
        double dot = 0.0;
        for (std::size_t k = 0; k < 3; ++k)
            dot += (part == 0 ? jet.A[k].real() : jet.A[k].imag()) * jet.N[k];
        if (std::abs(dot) > 1e-10 * std::max(1.0, scale)) return "normal not orthogonal to f_z";
    }
    if (!(jet.lambda > 0.0)) return "conformal factor must be positive";
    return {};
}

// sum_ij conj(A_i) A_j nabla_{E_i} E_j (complex frame components).
inline CVec3 connection_correction(const CVec3& Az, const Matrix2& A) {
    const auto t = frame_connection(A);
    CVec3 r{};
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 3; ++j) {
            const cplx w = std::conj(Az[i]) * Az[j];
            for (std::size_t k = 0; k < 3; ++k) r[k] += w * t.nabla[i][j][k];
        }
    return r;
}

namespace detail {
inline double beta(const Matrix2& A) { return 0.5 * (A.b() + A.c()); }

// -a|A1|^2 - d|A2|^2 - ((b+c)/2)(A1 conj(A2) + conj(A1) A2) = <nabla_{f_zbar} E3, f_z>
inline double a3_zbar_connection_part(const CVec3& Az, const Matrix2& A) {
    const cplx cross = Az[0] * std::conj(Az[1]) + std::conj(Az[0]) * Az[1];
    return -A.a() * std::norm(Az[0]) - A.d() * std::norm(Az[1]) - beta(A) * cross.real();
}
}  // namespace detail

// Closed form of (A3)_zbar for an immersion of constant mean curvature H.
inline cplx a3_zbar_rhs(const ConformalJet& jet, double H, const Matrix2& A) {
    const double lam = std::norm(jet.A[0]) + std::norm(jet.A[1]) + std::norm(jet.A[2]);
    return detail::a3_zbar_connection_part(jet.A, A) + H * jet.N3() * lam;
}

// Same identity for an arbitrary immersion: the CMC term is replaced by the
// E3 component of nabla_{f_zbar} f_z.
inline cplx a3_zbar_general(const CVec3& Az, cplx nabla_zbar_fz_e3, const Matrix2& A) {
    return detail::a3_zbar_connection_part(Az, A) + nabla_zbar_fz_e3;
}

// H = <nabla_{f_zbar} f_z, N> / (|A1|^2+|A2|^2+|A3|^2), where `dA_zbar` holds
// the zbar-derivatives of the frame components A_k and the connection term is
// added here.
inline double mean_curvature_from_jet(const ConformalJet& jet, const CVec3& dA_zbar,
                                      const Matrix2& A) {
    const double lam = std::norm(jet.A[0]) + std::norm(jet.A[1]) + std::norm(jet.A[2]);
    if (lam < 1e-14) throw Error(ErrorKind::degenerate, "degenerate parameterization");
    const CVec3 corr = connection_correction(jet.A, A);
    cplx s = 0.0;
    for (std::size_t k = 0; k < 3; ++k) s += (dA_zbar[k] + corr[k]) * jet.N[k];
    return s.real() / lam;
}

// ===========================================================================
// Triangle meshes
// ===========================================================================

using Face = std::array<std::size_t, 3>;

struct TriMesh {
    std::vector<GroupPoint> vertices;
    std::vector<Face> faces;
    std::vector<bool> boundary;  // per vertex: lies on an edge with one face

    // Validates topology and computes boundary flags.
    static TriMesh build(std::vector<GroupPoint> vertices, std::vector<Face> faces) {
        TriMesh m;
        m.vertices = std::move(vertices);
        m.faces = std::move(faces);
        m.refresh_topology();
        return m;
    }

    [[nodiscard]] std::size_t num_vertices() const { return vertices.size(); }
    [[nodiscard]] std::size_t num_faces() const { return faces.size(); }
    [[nodiscard]] std::size_t num_interior() const {
        return static_cast<std::size_t>(std::count(boundary.begin(), boundary.end(), false));
    }

    void refresh_topology() {
        const std::size_t nv = vertices.size();
        for (const auto& v : vertices) {
            if (!std::isfinite(v.x1) || !std::isfinite(v.x2) || !std::isfinite(v.x3))
                throw Error(ErrorKind::invalid_argument, "non-finite vertex");
        }
        // directed edge -> count; consistent orientation means every directed
        // edge is used at most once
        std::map<std::pair<std::size_t, std::size_t>, int> directed;
        for (const auto& f : faces) {
            for (auto i : f)
                if (i >= nv) throw Error(ErrorKind::invalid_argument, "face index out of range");
            if (f[0] == f[1] || f[1] == f[2] || f[0] == f[2])
                throw Error(ErrorKind::invalid_argument, "face repeats a vertex");
            for (int e = 0; e < 3; ++e) {
                const auto key = std::make_pair(f[e], f[(e + 1) % 3]);
                if (++directed[key] > 1)
                    throw Error(ErrorKind::invalid_argument,
                                "inconsistent orientation or non-manifold edge");
            }
        }
        boundary.assign(nv, false);
        for (const auto& [edge, count] : directed) {
            if (directed.find({edge.second, edge.first}) == directed.end()) {
                boundary[edge.first] = true;
                boundary[edge.second] = true;
            }
        }
    }
};

// Per-vertex scalar values.
struct ScalarField {
    std::vector<double> values;

    [[nodiscard]] std::size_t size() const { return values.size(); }
    double& operator[](std::size_t i) { return values[i]; }
    double operator[](std::size_t i) const { return values[i]; }
};

template <class Fn>
ScalarField sample_field(const TriMesh& m, Fn&& fn) {
    ScalarField f;
    f.values.reserve(m.num_vertices());
    for (const auto& v : m.vertices) f.values.push_back(fn(v));
    return f;
}

enum class Quadrature { barycenter = 1, edge_midpoints = 3 };

namespace detail {

inline Vec3 sub(const Vec3& a, const Vec3& b) { return {a[0] - b[0], a[1] - b[1], a[2] - b[2]}; }
inline Vec3 cross(const Vec3& a, const Vec3& b) {
    return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}
inline double dot(const Vec3& a, const Vec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }

// The metric is block diagonal with g33 = 1, so only the 2x2 block matters.
inline double quad(const Mat2& G, const Vec3& u, const Vec3& v) {
    return u[0] * (G.a11 * v[0] + G.a12 * v[1]) + u[1] * (G.a21 * v[0] + G.a22 * v[1]) +
           u[2] * v[2];
}
inline Vec3 apply(const Mat2& G, const Vec3& u, double g33 = 1.0) {
    return {G.a11 * u[0] + G.a12 * u[1], G.a21 * u[0] + G.a22 * u[1], g33 * u[2]};
}

struct QuadPoint {
    double weight;
    std::array<double, 3> bary;
};

inline std::vector<QuadPoint> quad_points(Quadrature q) {
    if (q == Quadrature::barycenter) return {{1.0, {1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0}}};
    return {{1.0 / 3.0, {0.5, 0.5, 0.0}}, {1.0 / 3.0, {0.0, 0.5, 0.5}},
            {1.0 / 3.0, {0.5, 0.0, 0.5}}};
}

constexpr double kDegenerateArea = 1e-14;

// Area of a coordinate triangle measured by the metric at the quadrature
// points; optionally accumulates the analytic gradient w.r.t. the vertices.
inline double face_area(const std::array<Vec3, 3>& p, const Matrix2& A, Quadrature q,
                        std::array<Vec3, 3>* grad) {
    const Vec3 e1 = sub(p[1], p[0]);
    const Vec3 e2 = sub(p[2], p[0]);
    double area = 0.0;
    if (grad) *grad = {};
    for (const auto& qp : quad_points(q)) {
        const double x3 = qp.bary[0] * p[0][2] + qp.bary[1] * p[1][2] + qp.bary[2] * p[2][2];
        const Mat2 G = metric_block(x3, A);
        const double g11 = quad(G, e1, e1), g22 = quad(G, e2, e2), g12 = quad(G, e1, e2);
        const double D = g11 * g22 - g12 * g12;
        const double a = 0.5 * std::sqrt(std::max(D, 0.0));
        if (!(a > kDegenerateArea)) throw Error(ErrorKind::degenerate, "degenerate face");
        area += qp.weight * a;
        if (!grad) continue;

        const Vec3 Ge1 = apply(G, e1), Ge2 = apply(G, e2);
        Vec3 d_e1, d_e2;
        for (std::size_t k = 0; k < 3; ++k) {
            d_e1[k] = (g22 * Ge1[k] - g12 * Ge2[k]) / (4.0 * a);
            d_e2[k] = (g11 * Ge2[k] - g12 * Ge1[k]) / (4.0 * a);
        }
        const Mat2 dG = metric_block_derivative(x3, A);
        // dG has no x3-x3 entry: g33 = 1 everywhere
        const double dg11 = quad(dG, {e1[0], e1[1], 0.0}, {e1[0], e1[1], 0.0});
        const double dg22 = quad(dG, {e2[0], e2[1], 0.0}, {e2[0], e2[1], 0.0});
        const double dg12 = quad(dG, {e1[0], e1[1], 0.0}, {e2[0], e2[1], 0.0});
        const double d_x3 = (dg11 * g22 + g11 * dg22 - 2.0 * g12 * dg12) / (8.0 * a);

        auto& g = *grad;
        for (std::size_t k = 0; k < 3; ++k) {
            g[0][k] -= qp.weight * (d_e1[k] + d_e2[k]);
            g[1][k] += qp.weight * d_e1[k];
            g[2][k] += qp.weight * d_e2[k];
        }
        for (std::size_t v = 0; v < 3; ++v) g[v][2] += qp.weight * d_x3 * qp.bary[v];
    }
    return area;
}

inline std::array<Vec3, 3> face_coords(const TriMesh& m, const Face& f) {
    return {m.vertices[f[0]].coords(), m.vertices[f[1]].coords(), m.vertices[f[2]].coords()};
}

}  // namespace detail

inline double mesh_area(const TriMesh& m, const Matrix2& A,
                        Quadrature q = Quadrature::barycenter) {
    double total = 0.0;
    for (const auto& f : m.faces) total += detail::face_area(detail::face_coords(m, f), A, q, nullptr);
    return total;
}

// Analytic coordinate gradient of mesh_area, one covector per vertex.
inline std::vector<Vec3> mesh_area_gradient(const TriMesh& m, const Matrix2& A,
                                            Quadrature q = Quadrature::barycenter) {
    std::vector<Vec3> g(m.num_vertices(), Vec3{0.0, 0.0, 0.0});
    std::array<Vec3, 3> fg;
    for (const auto& f : m.faces) {
        detail::face_area(detail::face_coords(m, f), A, q, &fg);
        for (std::size_t v = 0; v < 3; ++v)
            for (std::size_t k = 0; k < 3; ++k) g[f[v]][k] += fg[v][k];
    }
    return g;
}

// ---------------------------------------------------------------------------
// Enclosed volume
// ---------------------------------------------------------------------------

struct VolumeOptions {
    // Base leaf x3 = reference. When absent the base is x3 = 0 and the mesh
    // must be graph-like over the x1x2-plane.
    std::optional<double> reference_height;
};

namespace detail {

inline double projected_area(const std::array<Vec3, 3>& p) {
    return 0.5 * ((p[1][0] - p[0][0]) * (p[2][1] - p[0][1]) -
                  (p[2][0] - p[0][0]) * (p[1][1] - p[0][1]));
}

// +1 / -1 for a graph-like mesh (all faces project with the same orientation);
// throws otherwise.
inline double graph_orientation(const TriMesh& m) {
    int pos = 0, neg = 0;
    for (const auto& f : m.faces) {
        const double s = projected_area(face_coords(m, f));
        if (s > 0.0) ++pos;
        else if (s < 0.0) ++neg;
        else ++pos, ++neg;
    }
    if (pos > 0 && neg > 0)
        throw Error(ErrorKind::precondition,
                    "mesh is not a graph over the x1x2-plane; supply a reference height");
    return neg > 0 ? -1.0 : 1.0;
}

}  // namespace detail

// Riemannian volume (density e^{-tr(A) x3}) between the mesh and the base
// leaf, integrated exactly in x3 and over each projected triangle.
inline double mesh_volume_below(const TriMesh& m, const Matrix2& A, const VolumeOptions& opt = {}) {
    const double t = A.trace();
    const double ref = opt.reference_height.value_or(0.0);
    const double sign = opt.reference_height ? 1.0 : detail::graph_orientation(m);
    const double base = std::exp(-t * ref);
    double total = 0.0;
    for (const auto& f : m.faces) {
        const auto p = detail::face_coords(m, f);
        const double S = detail::projected_area(p);
        const std::array<double, 3> h{p[0][2] - ref, p[1][2] - ref, p[2][2] - ref};
        total += S * base * mean_volume_antiderivative(h, t);
    }
    return sign * total;
}

inline std::vector<Vec3> mesh_volume_gradient(const TriMesh& m, const Matrix2& A,
                                              const VolumeOptions& opt = {}) {
    const double t = A.trace();
    const double ref = opt.reference_height.value_or(0.0);
    const double sign = opt.reference_height ? 1.0 : detail::graph_orientation(m);
    const double base = std::exp(-t * ref);
    std::vector<Vec3> g(m.num_vertices(), Vec3{0.0, 0.0, 0.0});
    for (const auto& f : m.faces) {
        const auto p = detail::face_coords(m, f);
        const double S = detail::projected_area(p);
        const std::array<double, 3> h{p[0][2] - ref, p[1][2] - ref, p[2][2] - ref};
        const double M = base * mean_volume_antiderivative(h, t);
        const std::array<double, 3> habs{p[0][2], p[1][2], p[2][2]};
        // dS/dvertex (x1, x2 components)
        const std::array<std::array<double, 2>, 3> dS{{
            {0.5 * (p[1][1] - p[2][1]), 0.5 * (p[2][0] - p[1][0])},
            {0.5 * (p[2][1] - p[0][1]), 0.5 * (p[0][0] - p[2][0])},
            {0.5 * (p[0][1] - p[1][1]), 0.5 * (p[1][0] - p[0][0])},
        }};
        for (std::size_t v = 0; v < 3; ++v) {
            auto& gv = g[f[v]];
            gv[0] += sign * dS[v][0] * M;
            gv[1] += sign * dS[v][1] * M;
            gv[2] += sign * S * mean_volume_antiderivative_grad(habs, t, v);
        }
    }
    return g;
}

// ---------------------------------------------------------------------------
// Cotangent Laplace-Beltrami with metric edge lengths
// ---------------------------------------------------------------------------

struct CotanOperator {
    // per face: cotangent of the angle at each corner
    std::vector<std::array<double, 3>> cot;
    // mixed Voronoi vertex areas
    std::vector<double> mass;
};

namespace detail {

inline double metric_edge_length2(const Vec3& p, const Vec3& q, const Matrix2& A) {
    const Vec3 e = sub(q, p);
    return quad(metric_block(0.5 * (p[2] + q[2]), A), e, e);
}

}  // namespace detail

inline CotanOperator build_cotan_operator(const TriMesh& m, const Matrix2& A) {
    CotanOperator op;
    op.cot.resize(m.num_faces());
    op.mass.assign(m.num_vertices(), 0.0);
    for (std::size_t fi = 0; fi < m.num_faces(); ++fi) {
        const auto& f = m.faces[fi];
        const auto p = detail::face_coords(m, f);
        // l2[i]: squared length of the side opposite corner i
        std::array<double, 3> l2{};
        for (std::size_t i = 0; i < 3; ++i)
            l2[i] = detail::metric_edge_length2(p[(i + 1) % 3], p[(i + 2) % 3], A);
        std::array<double, 3> l{std::sqrt(l2[0]), std::sqrt(l2[1]), std::sqrt(l2[2])};
        // Kahan's stable Heron
        std::array<double, 3> s = l;
        std::sort(s.begin(), s.end(), std::greater<>());
        const double prod = (s[0] + (s[1] + s[2])) * (s[2] - (s[0] - s[1])) *
                            (s[2] + (s[0] - s[1])) * (s[0] + (s[1] - s[2]));
        const double area = 0.25 * std::sqrt(std::max(prod, 0.0));
        if (!(area > detail::kDegenerateArea))
            throw Error(ErrorKind::degenerate, "degenerate face in cotangent operator");
        for (std::size_t i = 0; i < 3; ++i) {
            const std::size_t j = (i + 1) % 3, k = (i + 2) % 3;
            op.cot[fi][i] = (l2[j] + l2[k] - l2[i]) / (4.0 * area);
        }
        const bool obtuse = op.cot[fi][0] < 0.0 || op.cot[fi][1] < 0.0 || op.cot[fi][2] < 0.0;
        for (std::size_t i = 0; i < 3; ++i) {
            const std::size_t j = (i + 1) % 3, k = (i + 2) % 3;
            if (!obtuse) {
                // Voronoi area: |P V_k|^2 cot(angle at j) + |P V_j|^2 cot(angle at k)
                op.mass[f[i]] += (l2[k] * op.cot[fi][k] + l2[j] * op.cot[fi][j]) / 8.0;
            } else {
                op.mass[f[i]] += op.cot[fi][i] < 0.0 ? 0.5 * area : 0.25 * area;
            }
        }
    }
    return op;
}

// Discrete Delta_Sigma f at interior vertices; boundary entries are 0.
inline ScalarField laplace_beltrami(const TriMesh& m, const ScalarField& f, const Matrix2& A) {
    if (f.size() != m.num_vertices())
        throw Error(ErrorKind::invalid_argument, "scalar field size does not match mesh");
    const CotanOperator op = build_cotan_operator(m, A);
    std::vector<double> acc(m.num_vertices(), 0.0);
    for (std::size_t fi = 0; fi < m.num_faces(); ++fi) {
        const auto& face = m.faces[fi];
        for (std::size_t c = 0; c < 3; ++c) {
            const std::size_t i = face[(c + 1) % 3], j = face[(c + 2) % 3];
            const double w = 0.5 * op.cot[fi][c];
            const double diff = f[j] - f[i];
            acc[i] += w * diff;
            acc[j] -= w * diff;
        }
    }
    ScalarField out;
    out.values.assign(m.num_vertices(), 0.0);
    for (std::size_t v = 0; v < m.num_vertices(); ++v) {
        if (m.boundary[v]) continue;
        if (!(op.mass[v] >= 1e-14))
            throw Error(ErrorKind::degenerate, "vertex mass underflow at " + std::to_string(v));
        out[v] = acc[v] / op.mass[v];
    }
    return out;
}

// ---------------------------------------------------------------------------
// Discrete mean curvature
// ---------------------------------------------------------------------------

struct VertexCurvature {
    double H = 0.0;
    FrameVector normal;
    bool interior = false;
};

// Mean curvature from the first variation of area: the mean curvature vector
// is -g^{-1} dArea / (2 mass). The normal is the metric-unit area-gradient
// direction, oriented to agree with the face winding; H is positive when the
// mean curvature vector points along that normal.
inline std::vector<VertexCurvature> discrete_mean_curvature(const TriMesh& m, const Matrix2& A,
                                                            Quadrature q = Quadrature::barycenter) {
    const auto grad = mesh_area_gradient(m, A, q);
    const CotanOperator op = build_cotan_operator(m, A);

    std::vector<Vec3> winding(m.num_vertices(), Vec3{0.0, 0.0, 0.0});
    for (const auto& f : m.faces) {
        const auto p = detail::face_coords(m, f);
        const Vec3 n = detail::cross(detail::sub(p[1], p[0]), detail::sub(p[2], p[0]));
        for (auto v : f)
            for (std::size_t k = 0; k < 3; ++k) winding[v][k] += n[k];
    }

    std::vector<VertexCurvature> out(m.num_vertices());
    for (std::size_t v = 0; v < m.num_vertices(); ++v) {
        const GroupPoint& p = m.vertices[v];
        const Mat2 G = metric_block(p.x3, A);
        const Mat2 Ginv{G.a22 / G.det(), -G.a12 / G.det(), -G.a21 / G.det(), G.a11 / G.det()};
        // winding covector -> metric normal vector
        Vec3 nw = detail::apply(Ginv, winding[v]);
        const double nw_len = std::sqrt(detail::quad(G, nw, nw));
        if (nw_len > 0.0)
            for (auto& x : nw) x /= nw_len;

        auto& out_v = out[v];
        out_v.interior = !m.boundary[v];
        Vec3 n = nw;
        if (out_v.interior) {
            if (!(op.mass[v] >= 1e-14))
                throw Error(ErrorKind::degenerate, "zero-mass vertex " + std::to_string(v));
            const Vec3 w = detail::apply(Ginv, grad[v]);
            const double w_len = std::sqrt(detail::quad(G, w, w));
            if (w_len > 0.0) {
                const double s = detail::dot(grad[v], nw) >= 0.0 ? 1.0 : -1.0;
                for (std::size_t k = 0; k < 3; ++k) n[k] = s * w[k] / w_len;
                out_v.H = -s * w_len / (2.0 * op.mass[v]);
            }
        }
        out_v.normal = coord_to_frame(CoordVector(n), p, A);
    }
    return out;
}

}  // namespace sdgeom

#pragma once
// Subharmonicity of phi = 1/x3 on H-surfaces close to the leaf x3 = 0:
// the threshold height C1, the four-term expression for x3^3 phi_{z zbar},
// its lower bound, jet fuzzing, and a mesh-level check.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>

#include "sdgeom/error.hpp"
#include "sdgeom/group.hpp"
#include "sdgeom/rng.hpp"
#include "sdgeom/surface.hpp"

namespace sdgeom {

struct LemmaConfig {
    Matrix2 A;
    double H = 0.0;
    double conformal_tol = 1e-10;
    double fuzz_tol = 1e-9;  // relative tolerance for the inequality checks

    // |H| <= H0 = trace(A)/2; runs outside are allowed but flagged.
    [[nodiscard]] bool in_regime() const { return std::abs(H) <= group_constants(A).H0 + 1e-15; }
};

// |H| + |a-d|/2 + |b+c|/2
inline double c1_denominator(const Matrix2& A, double H) {
    return std::abs(H) + 0.5 * std::abs(A.a() - A.d()) + 0.5 * std::abs(A.b() + A.c());
}

// Height below which 1/x3 is subharmonic on any H-surface; +inf when the
// denominator vanishes.
inline double c1_constant(const Matrix2& A, double H) {
    const double den = c1_denominator(A, H);
    if (den == 0.0) return std::numeric_limits<double>::infinity();
    return 2.0 / den;
}

struct LemmaBreakdown {
    double term1 = 0.0;  // (2 - H N3 x3) |A3|^2
    double term2 = 0.0;  // x3 ((a+d)/2 - H N3)(|A1|^2 + |A2|^2)
    double term3 = 0.0;  // x3 ((a-d)/2)(|A1|^2 - |A2|^2)
    double term4 = 0.0;  // x3 ((b+c)/2)(A1 conj(A2) + conj(A1) A2)
    double total = 0.0;  // x3^3 phi_{z zbar}
    double imag_residue = 0.0;
};

namespace detail {
inline void require_positive_height(const ConformalJet& jet) {
    if (!(jet.point.x3 > 0.0)) throw Error(ErrorKind::precondition, "x3 must be positive");
}
}  // namespace detail

// `n3_override` replaces the jet's stored N3 (adversarial sweeps).
inline LemmaBreakdown lemma_breakdown(const ConformalJet& jet, const LemmaConfig& cfg,
                                      std::optional<double> n3_override = {}) {
    detail::require_positive_height(jet);
    if (conformal_defect(jet) > cfg.conformal_tol)
        throw Error(ErrorKind::precondition, "jet is not conformal within tolerance");
    const Matrix2& A = cfg.A;
    const double x3 = jet.point.x3;
    const double n3 = n3_override.value_or(jet.N3());
    const double a1 = std::norm(jet.A[0]), a2 = std::norm(jet.A[1]), a3 = std::norm(jet.A[2]);
    const cplx cross = jet.A[0] * std::conj(jet.A[1]) + std::conj(jet.A[0]) * jet.A[1];

    LemmaBreakdown b;
    b.term1 = (2.0 - cfg.H * n3 * x3) * a3;
    b.term2 = x3 * (0.5 * (A.a() + A.d()) - cfg.H * n3) * (a1 + a2);
    b.term3 = x3 * 0.5 * (A.a() - A.d()) * (a1 - a2);
    b.term4 = x3 * 0.5 * (A.b() + A.c()) * cross.real();
    b.total = b.term1 + b.term2 + b.term3 + b.term4;
    b.imag_residue = std::abs(x3 * 0.5 * (A.b() + A.c()) * cross.imag());
    return b;
}

// x3^3 phi_{z zbar} = 2|A3|^2 - x3 (A3)_zbar, with (A3)_zbar from the closed
// form for CMC immersions. Independent of the four-term expansion.
inline double lemma_total_direct(const ConformalJet& jet, const LemmaConfig& cfg,
                                 std::optional<double> n3_override = {}) {
    detail::require_positive_height(jet);
    ConformalJet j = jet;
    if (n3_override) j.N[2] = *n3_override;
    const cplx a3z = a3_zbar_rhs(j, cfg.H, cfg.A);
    return 2.0 * std::norm(jet.A[2]) - jet.point.x3 * a3z.real();
}

// (2 - x3 (|H| + |a-d|/2 + |b+c|/2)) |A3|^2
inline double lower_bound(const ConformalJet& jet, const LemmaConfig& cfg) {
    detail::require_positive_height(jet);
    return (2.0 - jet.point.x3 * c1_denominator(cfg.A, cfg.H)) * std::norm(jet.A[2]);
}

// ---------------------------------------------------------------------------
// Isotropic triples and jet fuzzing
// ---------------------------------------------------------------------------

struct IsotropicTriple {
    cplx a1, a2, a3;
};

// A1, A2 uniform in the unit complex square; A3 = sign * i * sqrt(A1^2 + A2^2)
// (principal branch), sign chosen at random.
inline IsotropicTriple random_isotropic_triple(Rng& rng) {
    const cplx a1{rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)};
    const cplx a2{rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)};
    const double sign = (rng.bits() & 1u) ? 1.0 : -1.0;
    const cplx a3 = sign * cplx{0.0, 1.0} * std::sqrt(a1 * a1 + a2 * a2);
    return {a1, a2, a3};
}

struct TripleInequalities {
    double margin_diff = 0.0;   // |A3|^4 - (|A1|^2 - |A2|^2)^2
    double margin_cross = 0.0;  // |A3|^4 - (A1 conj(A2) + conj(A1) A2)^2
    double scale = 0.0;         // |A3|^4 + |A1|^4 + |A2|^4, for relative tolerances
};

inline TripleInequalities triple_inequalities(const IsotropicTriple& t) {
    const double n1 = std::norm(t.a1), n2 = std::norm(t.a2), n3 = std::norm(t.a3);
    const double cross = (t.a1 * std::conj(t.a2) + std::conj(t.a1) * t.a2).real();
    return {n3 * n3 - (n1 - n2) * (n1 - n2), n3 * n3 - cross * cross, n3 * n3 + n1 * n1 + n2 * n2};
}

enum class FuzzMode { stored_normal, adversarial };

struct JetFuzzReport {
    std::uint64_t samples = 0;
    double C1 = 0.0;
    bool in_regime = true;
    double min_total = std::numeric_limits<double>::infinity();
    double min_margin = std::numeric_limits<double>::infinity();  // total - lower_bound
    std::uint64_t violations = 0;             // total < lower_bound beyond tolerance
    std::uint64_t inequality_violations = 0;  // either triple inequality fails
    double max_decomposition_error = 0.0;     // |four-term total - direct| (relative)
};

// Samples conformal jets at heights x3 in (0, min(C1, height_cap)] and checks
// the decomposition, the lower bound and the triple inequalities. In
// adversarial mode N3 sweeps {-1, 0, 1} instead of using the stored normal.
inline JetFuzzReport fuzz_jets(const LemmaConfig& cfg, std::uint64_t samples, std::uint64_t seed,
                               FuzzMode mode = FuzzMode::stored_normal, double height_cap = 10.0) {
    Rng rng(seed);
    JetFuzzReport rep;
    rep.C1 = c1_constant(cfg.A, cfg.H);
    rep.in_regime = cfg.in_regime();
    const double hmax = std::min(rep.C1, height_cap);
    for (std::uint64_t s = 0; s < samples; ++s) {
        const auto t = random_isotropic_triple(rng);
        const GroupPoint p{rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0), rng.uniform_open_low(hmax)};
        ConformalJet jet;
        try {
            jet = ConformalJet::make(p, t.a1, t.a2, t.a3);
        } catch (const Error&) {
            continue;  // measure-zero degenerate draw
        }
        ++rep.samples;
        const auto ineq = triple_inequalities(t);
        const double itol = cfg.fuzz_tol * ineq.scale;
        if (ineq.margin_diff < -itol || ineq.margin_cross < -itol) ++rep.inequality_violations;

        const int sweeps = mode == FuzzMode::adversarial ? 3 : 1;
        for (int k = 0; k < sweeps; ++k) {
            std::optional<double> n3;
            if (mode == FuzzMode::adversarial) n3 = static_cast<double>(k - 1);
            const auto b = lemma_breakdown(jet, cfg, n3);
            const double lb = lower_bound(jet, cfg);
            const double scale = std::abs(b.term1) + std::abs(b.term2) + std::abs(b.term3) +
                                 std::abs(b.term4) + std::abs(lb);
            const double direct = lemma_total_direct(jet, cfg, n3);
            rep.max_decomposition_error =
                std::max(rep.max_decomposition_error, std::abs(b.total - direct) / std::max(scale, 1e-300));
            rep.min_total = std::min(rep.min_total, b.total);
            rep.min_margin = std::min(rep.min_margin, b.total - lb);
            if (b.total - lb < -cfg.fuzz_tol * scale) ++rep.violations;
        }
    }
    return rep;
}

// Searches jets just above C1 for a negative lower bound (the bound's regime
// is sharp). Returns the first height found, if any.
inline std::optional<double> probe_bound_sharpness(const LemmaConfig& cfg, std::uint64_t seed,
                                                   std::uint64_t tries = 1000, double above = 1.05) {
    const double c1 = c1_constant(cfg.A, cfg.H);
    if (!std::isfinite(c1)) return std::nullopt;
    Rng rng(seed);
    for (std::uint64_t s = 0; s < tries; ++s) {
        const auto t = random_isotropic_triple(rng);
        const GroupPoint p{0.0, 0.0, c1 * rng.uniform(1.0 + 1e-6, above)};
        const auto jet = ConformalJet::make(p, t.a1, t.a2, t.a3);
        if (lower_bound(jet, cfg) < 0.0) return p.x3;
    }
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// Mesh-level check
// ---------------------------------------------------------------------------

struct SubharmonicReport {
    double C1 = 0.0;
    bool in_regime = true;
    double min_laplacian = 0.0;  // min over interior vertices of Delta_Sigma(1/x3)
    double mean_edge = 0.0;      // h, mean metric edge length
    double threshold = 0.0;      // -K h
    double fraction_negative = 0.0;
    double max_H_deviation = 0.0;
    std::size_t interior_vertices = 0;
    bool passed = false;
};

struct SubharmonicOptions {
    double K = 10.0;
    double cmc_tolerance = 0.05;
    bool require_cmc = true;
};

inline double mean_edge_length(const TriMesh& m, const Matrix2& A) {
    double total = 0.0;
    std::size_t n = 0;
    for (const auto& f : m.faces)
        for (std::size_t c = 0; c < 3; ++c) {
            const auto p = m.vertices[f[c]].coords(), q = m.vertices[f[(c + 1) % 3]].coords();
            total += std::sqrt(detail::metric_edge_length2(p, q, A));
            ++n;
        }
    return n ? total / static_cast<double>(n) : 0.0;
}

// Left translation of every vertex by g (an isometry, affine in coordinates).
inline TriMesh left_translate(const TriMesh& m, const GroupPoint& g, const Matrix2& A) {
    TriMesh out = m;
    for (auto& v : out.vertices) v = multiply(g, v, A);
    return out;
}

inline SubharmonicReport verify_subharmonic_on_mesh(const TriMesh& m, const LemmaConfig& cfg,
                                                    const SubharmonicOptions& opt = {}) {
    SubharmonicReport rep;
    rep.C1 = c1_constant(cfg.A, cfg.H);
    rep.in_regime = cfg.in_regime();
    for (const auto& v : m.vertices) {
        if (!(v.x3 > 0.0) || v.x3 > rep.C1)
            throw Error(ErrorKind::precondition, "mesh heights must lie in (0, C1]");
    }
    const auto curv = discrete_mean_curvature(m, cfg.A);
    for (const auto& c : curv)
        if (c.interior) rep.max_H_deviation = std::max(rep.max_H_deviation, std::abs(c.H - cfg.H));
    if (opt.require_cmc && rep.max_H_deviation > opt.cmc_tolerance)
        throw Error(ErrorKind::precondition, "mesh is not an H-surface within tolerance (max |H - H_cfg| = " +
                                                 std::to_string(rep.max_H_deviation) + ")");

    const auto phi = sample_field(m, [](const GroupPoint& p) { return 1.0 / p.x3; });
    const auto lap = laplace_beltrami(m, phi, cfg.A);
    rep.mean_edge = mean_edge_length(m, cfg.A);
    rep.threshold = -opt.K * rep.mean_edge;
    rep.min_laplacian = std::numeric_limits<double>::infinity();
    std::size_t negative = 0;
    for (std::size_t v = 0; v < m.num_vertices(); ++v) {
        if (m.boundary[v]) continue;
        ++rep.interior_vertices;
        rep.min_laplacian = std::min(rep.min_laplacian, lap[v]);
        if (lap[v] < 0.0) ++negative;
    }
    if (rep.interior_vertices)
        rep.fraction_negative = static_cast<double>(negative) / static_cast<double>(rep.interior_vertices);
    rep.passed = rep.interior_vertices > 0 && rep.min_laplacian >= rep.threshold;
    return rep;
}

}  // namespace sdgeom

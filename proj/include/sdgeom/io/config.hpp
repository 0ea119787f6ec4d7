#pragma once
// JSON experiment configs for the command-line tool. Every parser rejects
// unknown keys, and to_json(from_json(j)) reproduces a fully specified j.

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"

#include "sdgeom/error.hpp"
#include "sdgeom/group.hpp"
#include "sdgeom/variational.hpp"

namespace sdgeom::io {

using json = nlohmann::json;

namespace detail {

inline void reject_unknown(const json& j, std::initializer_list<const char*> allowed, const std::string& where) {
    if (!j.is_object()) throw Error(ErrorKind::config, where + " must be a JSON object");
    std::set<std::string> ok(allowed.begin(), allowed.end());
    for (auto it = j.begin(); it != j.end(); ++it)
        if (!ok.count(it.key())) throw Error(ErrorKind::config, "unknown key '" + it.key() + "' in " + where);
}

template <class T>
T required(const json& j, const char* key, const std::string& where) {
    if (!j.contains(key)) throw Error(ErrorKind::config, "missing key '" + std::string(key) + "' in " + where);
    try {
        return j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw Error(ErrorKind::config, "bad value for '" + std::string(key) + "' in " + where + ": " + e.what());
    }
}

template <class T>
T optional(const json& j, const char* key, T fallback, const std::string& where) {
    return j.contains(key) ? required<T>(j, key, where) : fallback;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Shared pieces
// ---------------------------------------------------------------------------

inline json real_json(double x) {
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    if (std::isnan(x)) return "nan";
    return x;
}

inline Mat2 parse_matrix(const json& j) {
    if (!j.is_array() || j.size() != 2 || !j[0].is_array() || !j[1].is_array() || j[0].size() != 2 ||
        j[1].size() != 2)
        throw Error(ErrorKind::config, "A must be a 2x2 array [[a,b],[c,d]]");
    try {
        return {j[0][0].get<double>(), j[0][1].get<double>(), j[1][0].get<double>(), j[1][1].get<double>()};
    } catch (const json::exception& e) {
        throw Error(ErrorKind::config, std::string("A entries must be numbers: ") + e.what());
    }
}

inline json matrix_json(const Mat2& m) { return json::array({json::array({m.a11, m.a12}), json::array({m.a21, m.a22})}); }

inline GroupPoint parse_point(const json& j, const std::string& where) {
    if (!j.is_array() || j.size() != 3) throw Error(ErrorKind::config, where + " must be [x1,x2,x3]");
    return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}
inline json point_json(const GroupPoint& p) { return json::array({p.x1, p.x2, p.x3}); }

struct CirclesConfig {
    double R_in = 1.0, h_in = 0.0, R_out = 4.0, h_out = 0.0;
    int n_seg = 64, rings = 32;
    std::string spacing = "geometric";

    [[nodiscard]] BoundaryCircles circles() const { return {{R_in, h_in}, {R_out, h_out}, n_seg}; }
    [[nodiscard]] RadialSpacing radial_spacing() const {
        return spacing == "uniform" ? RadialSpacing::uniform : RadialSpacing::geometric;
    }
    friend bool operator==(const CirclesConfig&, const CirclesConfig&) = default;
};

inline CirclesConfig parse_circles(const json& j) {
    const std::string w = "circles";
    detail::reject_unknown(j, {"R_in", "h_in", "R_out", "h_out", "n_seg", "rings", "spacing"}, w);
    CirclesConfig c;
    c.R_in = detail::required<double>(j, "R_in", w);
    c.h_in = detail::required<double>(j, "h_in", w);
    c.R_out = detail::required<double>(j, "R_out", w);
    c.h_out = detail::required<double>(j, "h_out", w);
    c.n_seg = detail::optional<int>(j, "n_seg", c.n_seg, w);
    c.rings = detail::optional<int>(j, "rings", c.rings, w);
    c.spacing = detail::optional<std::string>(j, "spacing", c.spacing, w);
    if (c.spacing != "geometric" && c.spacing != "uniform")
        throw Error(ErrorKind::config, "circles.spacing must be 'geometric' or 'uniform'");
    return c;
}

inline json to_json(const CirclesConfig& c) {
    return {{"R_in", c.R_in}, {"h_in", c.h_in}, {"R_out", c.R_out}, {"h_out", c.h_out},
            {"n_seg", c.n_seg}, {"rings", c.rings}, {"spacing", c.spacing}};
}

// ---------------------------------------------------------------------------
// Per-command configs
// ---------------------------------------------------------------------------

struct GroupInfoConfig {
    Mat2 A;
    std::optional<double> H;  // for C1; defaults to H0
    std::vector<GroupPoint> points;
    std::uint64_t seed = 0;
    friend bool operator==(const GroupInfoConfig&, const GroupInfoConfig&) = default;
};

struct GeodesicConfig {
    Mat2 A;
    GroupPoint start;
    std::array<double, 3> velocity{0.0, 0.0, 1.0};
    double length = 1.0;
    int steps = 1000;
    std::uint64_t seed = 0;
    friend bool operator==(const GeodesicConfig&, const GeodesicConfig&) = default;
};

struct AnnulusConfig {
    Mat2 A;
    CirclesConfig circles;
    std::uint64_t seed = 0;
    friend bool operator==(const AnnulusConfig&, const AnnulusConfig&) = default;
};

struct MinimizeConfig {
    Mat2 A;
    double eps = 0.1;
    CirclesConfig circles;
    double tol_grad = 0.0;  // <= 0: 1e-6 * T(initial)
    int max_iter = 500;
    std::uint64_t seed = 0;
    std::optional<double> probe_radius;
    double H_tolerance = 0.05;
    friend bool operator==(const MinimizeConfig&, const MinimizeConfig&) = default;
};

struct VerifyLemmaConfig {
    Mat2 A;
    double H = 0.0;
    std::uint64_t samples = 100000;
    std::uint64_t seed = 0;
    std::string mode = "jets";  // jets | mesh
    std::string mesh_path;
    bool adversarial = false;
    double K = 10.0;
    std::optional<double> lift;  // x3 shift applied by left translation before the mesh check
    friend bool operator==(const VerifyLemmaConfig&, const VerifyLemmaConfig&) = default;
};

inline GroupInfoConfig parse_group_info(const json& j) {
    const std::string w = "group-info config";
    detail::reject_unknown(j, {"A", "H", "points", "seed"}, w);
    GroupInfoConfig c;
    c.A = parse_matrix(detail::required<json>(j, "A", w));
    if (j.contains("H")) c.H = detail::required<double>(j, "H", w);
    if (j.contains("points"))
        for (const auto& p : j.at("points")) c.points.push_back(parse_point(p, "points[]"));
    c.seed = detail::optional<std::uint64_t>(j, "seed", 0, w);
    return c;
}

inline json to_json(const GroupInfoConfig& c) {
    json j{{"A", matrix_json(c.A)}, {"seed", c.seed}};
    if (c.H) j["H"] = *c.H;
    json pts = json::array();
    for (const auto& p : c.points) pts.push_back(point_json(p));
    j["points"] = pts;
    return j;
}

inline GeodesicConfig parse_geodesic(const json& j) {
    const std::string w = "geodesic config";
    detail::reject_unknown(j, {"A", "start", "velocity", "length", "steps", "seed"}, w);
    GeodesicConfig c;
    c.A = parse_matrix(detail::required<json>(j, "A", w));
    c.start = parse_point(detail::required<json>(j, "start", w), "start");
    const auto v = parse_point(detail::required<json>(j, "velocity", w), "velocity");
    c.velocity = {v.x1, v.x2, v.x3};
    c.length = detail::required<double>(j, "length", w);
    c.steps = detail::required<int>(j, "steps", w);
    c.seed = detail::optional<std::uint64_t>(j, "seed", 0, w);
    return c;
}

inline json to_json(const GeodesicConfig& c) {
    return {{"A", matrix_json(c.A)},
            {"start", point_json(c.start)},
            {"velocity", json::array({c.velocity[0], c.velocity[1], c.velocity[2]})},
            {"length", c.length},
            {"steps", c.steps},
            {"seed", c.seed}};
}

inline AnnulusConfig parse_annulus(const json& j) {
    const std::string w = "mesh make-annulus config";
    detail::reject_unknown(j, {"A", "circles", "seed"}, w);
    AnnulusConfig c;
    c.A = j.contains("A") ? parse_matrix(j.at("A")) : Mat2{};
    c.circles = parse_circles(detail::required<json>(j, "circles", w));
    c.seed = detail::optional<std::uint64_t>(j, "seed", 0, w);
    return c;
}

inline json to_json(const AnnulusConfig& c) {
    return {{"A", matrix_json(c.A)}, {"circles", to_json(c.circles)}, {"seed", c.seed}};
}

inline MinimizeConfig parse_minimize(const json& j) {
    const std::string w = "minimize config";
    detail::reject_unknown(j, {"A", "eps", "circles", "tol_grad", "max_iter", "seed", "probe_radius", "H_tolerance"}, w);
    MinimizeConfig c;
    c.A = parse_matrix(detail::required<json>(j, "A", w));
    c.eps = detail::required<double>(j, "eps", w);
    c.circles = parse_circles(detail::required<json>(j, "circles", w));
    c.tol_grad = detail::optional<double>(j, "tol_grad", c.tol_grad, w);
    c.max_iter = detail::optional<int>(j, "max_iter", c.max_iter, w);
    c.seed = detail::optional<std::uint64_t>(j, "seed", 0, w);
    if (j.contains("probe_radius")) c.probe_radius = detail::required<double>(j, "probe_radius", w);
    c.H_tolerance = detail::optional<double>(j, "H_tolerance", c.H_tolerance, w);
    return c;
}

inline json to_json(const MinimizeConfig& c) {
    json j{{"A", matrix_json(c.A)}, {"eps", c.eps},           {"circles", to_json(c.circles)},
           {"tol_grad", c.tol_grad}, {"max_iter", c.max_iter}, {"seed", c.seed},
           {"H_tolerance", c.H_tolerance}};
    if (c.probe_radius) j["probe_radius"] = *c.probe_radius;
    return j;
}

inline VerifyLemmaConfig parse_verify_lemma(const json& j) {
    const std::string w = "verify-lemma config";
    detail::reject_unknown(j, {"A", "H", "samples", "seed", "mode", "mesh_path", "adversarial", "K", "lift"}, w);
    VerifyLemmaConfig c;
    c.A = parse_matrix(detail::required<json>(j, "A", w));
    c.H = detail::required<double>(j, "H", w);
    c.samples = detail::optional<std::uint64_t>(j, "samples", c.samples, w);
    c.seed = detail::optional<std::uint64_t>(j, "seed", 0, w);
    c.mode = detail::optional<std::string>(j, "mode", c.mode, w);
    if (c.mode != "jets" && c.mode != "mesh") throw Error(ErrorKind::config, "mode must be 'jets' or 'mesh'");
    c.mesh_path = detail::optional<std::string>(j, "mesh_path", "", w);
    if (c.mode == "mesh" && c.mesh_path.empty()) throw Error(ErrorKind::config, "mesh mode requires mesh_path");
    c.adversarial = detail::optional<bool>(j, "adversarial", false, w);
    c.K = detail::optional<double>(j, "K", c.K, w);
    if (j.contains("lift")) c.lift = detail::required<double>(j, "lift", w);
    return c;
}

inline json to_json(const VerifyLemmaConfig& c) {
    json j{{"A", matrix_json(c.A)}, {"H", c.H},          {"samples", c.samples},
           {"seed", c.seed},        {"mode", c.mode},    {"mesh_path", c.mesh_path},
           {"adversarial", c.adversarial}, {"K", c.K}};
    if (c.lift) j["lift"] = *c.lift;
    return j;
}

// ---------------------------------------------------------------------------
// Reports
// ---------------------------------------------------------------------------

struct Check {
    std::string name;
    bool passed = false;
    double measured = 0.0;
    double tolerance = 0.0;
    std::string comparator;  // e.g. "<=", ">="
};

inline json to_json(const Check& c) {
    return {{"name", c.name},
            {"passed", c.passed},
            {"measured", real_json(c.measured)},
            {"tolerance", real_json(c.tolerance)},
            {"comparator", c.comparator}};
}

inline Check check_le(std::string name, double measured, double tol) {
    return {std::move(name), measured <= tol, measured, tol, "<="};
}
inline Check check_ge(std::string name, double measured, double tol) {
    return {std::move(name), measured >= tol, measured, tol, ">="};
}

inline json to_json(const MinimizeReport& r) {
    json log = json::array();
    for (const auto& it : r.log)
        log.push_back({{"iter", it.iter}, {"T", it.T}, {"grad_norm", it.grad_norm}, {"flatness", it.flatness}});
    return {{"T", r.T},
            {"area", r.area},
            {"volume", r.volume},
            {"grad_sup", r.grad_sup},
            {"tol_grad", r.tol_grad},
            {"H", {{"mean", r.H.mean}, {"max_dev", r.H.max_dev}, {"min", r.H.min}, {"max", r.H.max}}},
            {"flatness", r.flatness},
            {"min_height", r.min_height},
            {"max_height", r.max_height},
            {"iterations", r.iterations},
            {"converged", r.converged},
            {"monotone", r.monotone},
            {"slab_confined", r.slab_confined},
            {"boundary_fixed", r.boundary_fixed},
            {"line_search", {{"shrink", r.armijo_shrink}, {"slope_fraction", r.armijo_slope}, {"initial_step", r.initial_step}}}};
}

}  // namespace sdgeom::io

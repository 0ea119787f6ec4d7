// sdgeom: command-line front end.
//
//   sdgeom group-info        --config A.json [--out dir]
//   sdgeom geodesic          --config g.json [--out dir]
//   sdgeom mesh make-annulus --config m.json [--out dir]
//   sdgeom minimize          --config m.json [--out dir] [--seed n]
//   sdgeom verify-lemma      --config v.json [--out dir] [--seed n]
//
// Exit status: 0 when every asserted check passes, 1 when a check fails,
// 2 on configuration, I/O or numerical errors.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "sdgeom/geometry.hpp"
#include "sdgeom/io/config.hpp"
#include "sdgeom/lemma.hpp"
#include "sdgeom/mesh_io.hpp"
#include "sdgeom/variational.hpp"

namespace fs = std::filesystem;
using namespace sdgeom;
using io::json;

namespace {

constexpr const char* kVersion = "sdgeom 0.1.0";

struct Options {
    std::string config_path;
    std::string out_dir = ".";
    std::optional<std::uint64_t> seed;
    bool timing = false;
    bool quiet = false;
};

void write_atomic(const fs::path& path, const std::string& content) {
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
        if (!os) throw Error(ErrorKind::io, "cannot write " + tmp.string());
        os << content;
        os.flush();
        if (!os) throw Error(ErrorKind::io, "write failed for " + tmp.string());
    }
    std::error_code ec;
    fs::rename(tmp, path, ec);
    if (ec) throw Error(ErrorKind::io, "cannot rename " + tmp.string() + " to " + path.string() + ": " + ec.message());
}

json load_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::io, "cannot open config " + path);
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw Error(ErrorKind::config, "invalid JSON in " + path + ": " + e.what());
    }
}

class Run {
public:
    Run(std::string command, const Options& opt) : command_(std::move(command)), opt_(opt) {
        start_ = std::chrono::steady_clock::now();
        fs::create_directories(opt_.out_dir);
    }

    fs::path artifact(const std::string& name, const std::string& content) {
        const fs::path p = fs::path(opt_.out_dir) / name;
        write_atomic(p, content);
        artifacts_.push_back(name);
        return p;
    }

    void check(io::Check c) { checks_.push_back(std::move(c)); }

    int finish(const json& config, json result, bool matrix_flipped) {
        bool ok = true;
        json checks = json::array();
        for (const auto& c : checks_) {
            ok = ok && c.passed;
            checks.push_back(io::to_json(c));
        }
        json report{{"version", kVersion},
                    {"command", command_},
                    {"config", config},
                    {"matrix_flipped", matrix_flipped},
                    {"artifacts", artifacts_},
                    {"result", std::move(result)},
                    {"checks", checks},
                    {"passed", ok}};
        if (opt_.timing) {
            const auto dt = std::chrono::steady_clock::now() - start_;
            report["wall_clock_s"] = std::chrono::duration<double>(dt).count();
        }
        const std::string text = report.dump(2) + "\n";
        write_atomic(fs::path(opt_.out_dir) / "report.json", text);
        if (!opt_.quiet) std::cout << text;
        for (const auto& c : checks_)
            if (!c.passed)
                std::cerr << "check failed: " << c.name << " (measured " << c.measured << ", required "
                          << c.comparator << ' ' << c.tolerance << ")\n";
        return ok ? 0 : 1;
    }

private:
    std::string command_;
    Options opt_;
    std::vector<std::string> artifacts_;
    std::vector<io::Check> checks_;
    std::chrono::steady_clock::time_point start_;
};

json frame_json(const Frame& f) {
    json j = json::array();
    for (std::size_t i = 0; i < 3; ++i) j.push_back(json::array({f[i][0], f[i][1], f[i][2]}));
    return j;
}

// ---------------------------------------------------------------------------

int cmd_group_info(const Options& opt) {
    auto cfg = io::parse_group_info(load_json(opt.config_path));
    if (opt.seed) cfg.seed = *opt.seed;
    const Matrix2 A(cfg.A);
    const auto gc = group_constants(A);
    const double H = cfg.H.value_or(gc.H0);
    Run run("group-info", opt);

    json points = json::array();
    double ortho = 0.0;
    for (const auto& p : cfg.points) {
        const auto f = left_frame_at(p, A);
        const auto g = metric_at(p, A);
        json gm = json::array();
        for (const auto& row : g.g) gm.push_back(json::array({row[0], row[1], row[2]}));
        for (std::size_t i = 0; i < 3; ++i)
            for (std::size_t j = 0; j < 3; ++j) {
                ortho = std::max(ortho, std::abs(g.inner(f[i], f[j]) - (i == j ? 1.0 : 0.0)));
            }
        points.push_back({{"point", io::point_json(p)}, {"left_frame", frame_json(f)},
                          {"right_frame", frame_json(right_frame_at(p, A))}, {"metric", gm}});
    }
    if (!cfg.points.empty()) run.check(io::check_le("frame_orthonormality", ortho, 1e-12));

    json result{{"A_effective", io::matrix_json(A.mat())},
                {"trace", gc.trace},
                {"H0", gc.H0},
                {"unimodular", gc.unimodular},
                {"euclidean", A.mat().a11 == 0.0 && A.mat().a12 == 0.0 && A.mat().a21 == 0.0 && A.mat().a22 == 0.0},
                {"H", H},
                {"C1", io::real_json(c1_constant(A, H))},
                {"points", points}};
    return run.finish(io::to_json(cfg), result, A.flipped());
}

int cmd_geodesic(const Options& opt) {
    auto cfg = io::parse_geodesic(load_json(opt.config_path));
    if (opt.seed) cfg.seed = *opt.seed;
    const Matrix2 A(cfg.A);
    Run run("geodesic", opt);
    const FrameVector v0{cfg.velocity[0], cfg.velocity[1], cfg.velocity[2]};
    const auto path = geodesic_integrate({cfg.start, v0}, cfg.length, cfg.steps, A);

    std::ostringstream csv;
    csv << "t,x1,x2,x3,v1,v2,v3\n";
    for (const auto& s : path.samples)
        csv << format_real(s.t) << ',' << format_real(s.point.x1) << ',' << format_real(s.point.x2) << ','
            << format_real(s.point.x3) << ',' << format_real(s.velocity[0]) << ',' << format_real(s.velocity[1])
            << ',' << format_real(s.velocity[2]) << '\n';
    run.artifact("geodesic.csv", csv.str());

    const double drift = path.max_speed_drift();
    run.check(io::check_le("speed_drift", drift, 1e-8));
    const auto& end = path.back();
    json result{{"samples", path.samples.size()},
                {"end_point", io::point_json(end.point)},
                {"end_velocity", json::array({end.velocity[0], end.velocity[1], end.velocity[2]})},
                {"max_speed_drift", drift}};
    return run.finish(io::to_json(cfg), result, A.flipped());
}

int cmd_make_annulus(const Options& opt) {
    auto cfg = io::parse_annulus(load_json(opt.config_path));
    if (opt.seed) cfg.seed = *opt.seed;
    const Matrix2 A(cfg.A);
    Run run("mesh make-annulus", opt);
    const auto m = make_annulus_mesh(cfg.circles.circles(), cfg.circles.rings, cfg.circles.radial_spacing());

    std::ostringstream obj;
    write_obj(obj, m);
    run.artifact("annulus.obj", obj.str());
    std::ostringstream heights;
    write_scalar_csv(heights, sample_field(m, [](const GroupPoint& p) { return p.x3; }));
    run.artifact("heights.csv", heights.str());

    std::size_t boundary = 0;
    for (bool b : m.boundary) boundary += b ? 1 : 0;
    const double expected = static_cast<double>(cfg.circles.n_seg) * (cfg.circles.rings + 1);
    run.check(io::check_le("vertex_count_error", std::abs(static_cast<double>(m.num_vertices()) - expected), 0.0));
    json result{{"vertices", m.num_vertices()},
                {"faces", m.num_faces()},
                {"boundary_vertices", boundary},
                {"area", mesh_area(m, A)}};
    return run.finish(io::to_json(cfg), result, A.flipped());
}

int cmd_minimize(const Options& opt) {
    auto cfg = io::parse_minimize(load_json(opt.config_path));
    if (opt.seed) cfg.seed = *opt.seed;
    const Matrix2 A(cfg.A);
    Run run("minimize", opt);

    const auto start = make_annulus_mesh(cfg.circles.circles(), cfg.circles.rings, cfg.circles.radial_spacing());
    const auto slab = SlabConfig::make(A, cfg.eps);
    MinimizeOptions mo;
    mo.tol_grad = cfg.tol_grad;
    mo.max_iter = cfg.max_iter;
    mo.probe_radius = cfg.probe_radius.value_or(std::min(2.0 * cfg.circles.R_in, cfg.circles.R_out));
    auto [m, rep] = minimize(start, slab, mo);

    std::ostringstream obj;
    write_obj(obj, m);
    run.artifact("mesh.obj", obj.str());

    std::ostringstream log;
    log << "iter,T,grad_norm,flatness\n";
    for (const auto& r : rep.log)
        log << r.iter << ',' << format_real(r.T) << ',' << format_real(r.grad_norm) << ',' << format_real(r.flatness)
            << '\n';
    run.artifact("iterations.csv", log.str());

    ScalarField H;
    for (const auto& c : discrete_mean_curvature(m, A)) H.values.push_back(c.interior ? c.H : 0.0);
    std::ostringstream hcsv;
    write_scalar_csv(hcsv, H);
    run.artifact("mean_curvature.csv", hcsv.str());

    run.check(io::check_le("grad_sup", rep.grad_sup, rep.tol_grad));
    run.check(io::check_le("interior_H_deviation", rep.H.max_dev, cfg.H_tolerance));
    run.check(io::check_ge("energy_monotone", rep.monotone ? 1.0 : 0.0, 1.0));
    run.check(io::check_ge("slab_confined", rep.slab_confined ? 1.0 : 0.0, 1.0));
    run.check(io::check_ge("boundary_fixed", rep.boundary_fixed ? 1.0 : 0.0, 1.0));
    json result = io::to_json(rep);
    result["H0"] = slab.H0;
    result["probe_radius"] = mo.probe_radius;
    return run.finish(io::to_json(cfg), result, A.flipped());
}

int cmd_verify_lemma(const Options& opt) {
    auto cfg = io::parse_verify_lemma(load_json(opt.config_path));
    if (opt.seed) cfg.seed = *opt.seed;
    const Matrix2 A(cfg.A);
    Run run("verify-lemma", opt);
    LemmaConfig lc{A, cfg.H};
    const double C1 = c1_constant(A, cfg.H);
    json result{{"C1", io::real_json(C1)}, {"in_regime", lc.in_regime()}, {"mode", cfg.mode}};

    if (cfg.mode == "jets") {
        const auto mode = cfg.adversarial ? FuzzMode::adversarial : FuzzMode::stored_normal;
        const auto rep = fuzz_jets(lc, cfg.samples, cfg.seed, mode);
        result["samples"] = rep.samples;
        result["min_total"] = io::real_json(rep.min_total);
        result["min_margin"] = io::real_json(rep.min_margin);
        result["violations"] = rep.violations;
        result["inequality_violations"] = rep.inequality_violations;
        result["max_decomposition_error"] = rep.max_decomposition_error;
        const auto sharp = probe_bound_sharpness(lc, cfg.seed);
        result["negative_bound_above_C1"] = sharp ? json(*sharp) : json(nullptr);
        run.check(io::check_le("lower_bound_violations", static_cast<double>(rep.violations), 0.0));
        run.check(io::check_le("triple_inequality_violations", static_cast<double>(rep.inequality_violations), 0.0));
        run.check(io::check_le("decomposition_error", rep.max_decomposition_error, 1e-12));
    } else {
        TriMesh m = read_obj_file(cfg.mesh_path);
        double lift = 0.0;
        if (cfg.lift) {
            lift = *cfg.lift;
        } else {
            double lo = std::numeric_limits<double>::infinity();
            for (const auto& v : m.vertices) lo = std::min(lo, v.x3);
            if (!(lo > 0.0) && std::isfinite(C1)) lift = 0.5 * C1;
        }
        if (lift != 0.0) m = left_translate(m, {0.0, 0.0, lift}, A);
        SubharmonicOptions so;
        so.K = cfg.K;
        const auto rep = verify_subharmonic_on_mesh(m, lc, so);
        std::size_t below = 0;
        const auto lap = laplace_beltrami(m, sample_field(m, [](const GroupPoint& p) { return 1.0 / p.x3; }), A);
        for (std::size_t v = 0; v < m.num_vertices(); ++v)
            if (!m.boundary[v] && lap[v] < rep.threshold) ++below;
        std::ostringstream csv;
        write_scalar_csv(csv, lap);
        run.artifact("laplacian.csv", csv.str());
        result["lift"] = lift;
        result["min_total"] = rep.min_laplacian;
        result["min_margin"] = rep.min_laplacian - rep.threshold;
        result["violations"] = below;
        result["mean_edge"] = rep.mean_edge;
        result["threshold"] = rep.threshold;
        result["fraction_negative"] = rep.fraction_negative;
        result["max_H_deviation"] = rep.max_H_deviation;
        result["interior_vertices"] = rep.interior_vertices;
        run.check(io::check_ge("min_laplacian", rep.min_laplacian, rep.threshold));
    }
    return run.finish(io::to_json(cfg), result, A.flipped());
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Numerical geometry of the metric Lie groups R^2 x|_A R"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);
    Options opt;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", opt.config_path, "JSON config")->required()->check(CLI::ExistingFile);
        sub->add_option("--out", opt.out_dir, "output directory");
        sub->add_option("--seed", opt.seed, "override the config seed");
        sub->add_flag("--timing", opt.timing, "record wall-clock time in the report");
        sub->add_flag("-q,--quiet", opt.quiet, "do not echo the report");
    };

    int (*handler)(const Options&) = nullptr;
    auto* gi = app.add_subcommand("group-info", "group constants, frames and metric");
    add_common(gi);
    gi->callback([&] { handler = cmd_group_info; });
    auto* geo = app.add_subcommand("geodesic", "integrate a unit-speed geodesic");
    add_common(geo);
    geo->callback([&] { handler = cmd_geodesic; });
    auto* mesh = app.add_subcommand("mesh", "mesh utilities");
    mesh->require_subcommand(1);
    auto* ann = mesh->add_subcommand("make-annulus", "structured annulus between two horizontal circles");
    add_common(ann);
    ann->callback([&] { handler = cmd_make_annulus; });
    auto* mn = app.add_subcommand("minimize", "minimize Area + 2 H0 Volume in a slab");
    add_common(mn);
    mn->callback([&] { handler = cmd_minimize; });
    auto* vl = app.add_subcommand("verify-lemma", "check subharmonicity of 1/x3 on jets or a mesh");
    add_common(vl);
    vl->callback([&] { handler = cmd_verify_lemma; });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }
    if (!handler) return 2;
    try {
        return handler(opt);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
}

#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "sdgeom/io/config.hpp"

using namespace sdgeom;
using namespace sdgeom::io;
namespace fs = std::filesystem;

namespace {

template <class Parse>
void expect_round_trip(const json& j, Parse parse) {
    const auto c = parse(j);
    const json emitted = to_json(c);
    EXPECT_EQ(emitted, j) << emitted.dump();
    EXPECT_EQ(to_json(parse(emitted)).dump(), emitted.dump());
}

const json circles_json = {{"R_in", 1.0},   {"h_in", 0.1}, {"R_out", 6.0},          {"h_out", 0.0},
                           {"n_seg", 32}, {"rings", 16}, {"spacing", "geometric"}};

std::string slurp(const fs::path& p) {
    std::ifstream is(p, std::ios::binary);
    std::stringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

class Cli : public ::testing::Test {
protected:
    fs::path dir;

    void SetUp() override {
        dir = fs::temp_directory_path() /
              ("sdgeom_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
        fs::remove_all(dir);
        fs::create_directories(dir);
    }
    void TearDown() override { fs::remove_all(dir); }

    fs::path write_config(const std::string& name, const json& j) const {
        const auto p = dir / name;
        std::ofstream(p) << j.dump(2);
        return p;
    }

    int run(const std::string& args) const {
        const std::string cmd = std::string(SDGEOM_CLI) + " " + args + " -q > " + (dir / "stdout.txt").string() + " 2>&1";
        const int status = std::system(cmd.c_str());
        return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    }

    json report(const fs::path& out) const { return json::parse(slurp(out / "report.json")); }
};

}  // namespace

TEST(Config, RoundTrips) {
    expect_round_trip(json{{"A", {{1.0, 0.0}, {0.0, 1.0}}}, {"seed", 3}, {"H", 0.5}, {"points", {{0.1, 0.2, 0.3}}}},
                      parse_group_info);
    expect_round_trip(json{{"A", {{0.0, 1.0}, {0.0, 0.0}}},
                           {"start", {0.0, 0.0, 0.0}},
                           {"velocity", {1.0, 0.0, 0.0}},
                           {"length", 2.5},
                           {"steps", 500},
                           {"seed", 0}},
                      parse_geodesic);
    expect_round_trip(json{{"A", {{1.0, 0.0}, {0.0, 1.0}}}, {"circles", circles_json}, {"seed", 9}}, parse_annulus);
    expect_round_trip(json{{"A", {{1.0, 0.0}, {0.0, 1.0}}},
                           {"eps", 0.1},
                           {"circles", circles_json},
                           {"tol_grad", 1e-7},
                           {"max_iter", 50},
                           {"seed", 1},
                           {"probe_radius", 2.0},
                           {"H_tolerance", 0.05}},
                      parse_minimize);
    expect_round_trip(json{{"A", {{1.0, 0.0}, {0.0, 1.0}}},
                           {"H", 1.0},
                           {"samples", 100},
                           {"seed", 4},
                           {"mode", "mesh"},
                           {"mesh_path", "m.obj"},
                           {"adversarial", true},
                           {"K", 10.0},
                           {"lift", 1.0}},
                      parse_verify_lemma);
}

TEST(Config, DefaultsAreFilledIn) {
    const auto c = parse_minimize(json{{"A", {{1.0, 0.0}, {0.0, 1.0}}},
                                       {"eps", 0.1},
                                       {"circles", {{"R_in", 1.0}, {"h_in", 0.1}, {"R_out", 6.0}, {"h_out", 0.0}}}});
    EXPECT_EQ(c.max_iter, 500);
    EXPECT_EQ(c.circles.n_seg, 64);
    EXPECT_EQ(c.circles.rings, 32);
    EXPECT_FALSE(c.probe_radius.has_value());
    EXPECT_EQ(parse_minimize(to_json(c)), c);
}

TEST(Config, RejectsUnknownKeys) {
    EXPECT_THROW(parse_group_info(json{{"A", {{1.0, 0.0}, {0.0, 1.0}}}, {"bogus", 1}}), Error);
    auto circ = circles_json;
    circ["extra"] = 1;
    EXPECT_THROW(parse_annulus(json{{"circles", circ}}), Error);
    EXPECT_THROW(parse_verify_lemma(json{{"A", {{1.0, 0.0}, {0.0, 1.0}}}, {"H", 1.0}, {"Samples", 5}}), Error);
}

TEST(Config, RejectsMalformedValues) {
    EXPECT_THROW(parse_group_info(json{{"A", {{1.0, 0.0, 0.0}, {0.0, 1.0}}}}), Error);
    EXPECT_THROW(parse_group_info(json{{"A", {1.0, 0.0}}}), Error);
    EXPECT_THROW(parse_group_info(json{{"A", {{"x", 0.0}, {0.0, 1.0}}}}), Error);
    EXPECT_THROW(parse_group_info(json::object()), Error);
    EXPECT_THROW(parse_verify_lemma(json{{"A", {{1.0, 0.0}, {0.0, 1.0}}}, {"H", 1.0}, {"mode", "grid"}}), Error);
    EXPECT_THROW(parse_verify_lemma(json{{"A", {{1.0, 0.0}, {0.0, 1.0}}}, {"H", 1.0}, {"mode", "mesh"}}), Error);
    auto circ = circles_json;
    circ["spacing"] = "cubic";
    EXPECT_THROW(parse_annulus(json{{"circles", circ}}), Error);
}

TEST(Config, InfinityIsWrittenAsString) {
    EXPECT_EQ(real_json(INFINITY), "inf");
    EXPECT_EQ(real_json(-INFINITY), "-inf");
    EXPECT_EQ(real_json(2.0), 2.0);
}

TEST(Checks, Comparators) {
    EXPECT_TRUE(check_le("a", 1.0, 1.0).passed);
    EXPECT_FALSE(check_le("a", 1.5, 1.0).passed);
    EXPECT_TRUE(check_ge("b", 0.0, -1.0).passed);
    EXPECT_FALSE(check_ge("b", std::nan(""), -1.0).passed);
    EXPECT_FALSE(check_le("a", std::nan(""), 1.0).passed);
}

TEST_F(Cli, GroupInfoIsDeterministic) {
    const auto cfg = write_config("g.json", {{"A", {{0.0, 1.0}, {0.0, 0.0}}}, {"points", {{0.1, 0.2, 0.3}}}});
    ASSERT_EQ(run("group-info --config " + cfg.string() + " --out " + (dir / "a").string()), 0);
    ASSERT_EQ(run("group-info --config " + cfg.string() + " --out " + (dir / "b").string()), 0);
    EXPECT_EQ(slurp(dir / "a" / "report.json"), slurp(dir / "b" / "report.json"));
    const auto r = report(dir / "a");
    EXPECT_EQ(r["result"]["C1"], 4.0);
    EXPECT_TRUE(r["passed"].get<bool>());
    for (const auto& e : fs::directory_iterator(dir / "a")) EXPECT_NE(e.path().extension(), ".tmp");
}

TEST_F(Cli, ConfigErrorsExitTwo) {
    const auto cfg = write_config("g.json", {{"A", {{1.0, 0.0}, {0.0, 1.0}}}, {"bogus", 1}});
    EXPECT_EQ(run("group-info --config " + cfg.string() + " --out " + dir.string()), 2);
    EXPECT_FALSE(fs::exists(dir / "report.json"));
    EXPECT_EQ(run("group-info --config " + (dir / "missing.json").string()), 2);
    std::ofstream(dir / "broken.json") << "{\"A\": [[1, 0], [0, 1]";
    EXPECT_EQ(run("group-info --config " + (dir / "broken.json").string() + " --out " + dir.string()), 2);
    EXPECT_EQ(run("frobnicate"), 2);
    EXPECT_EQ(run("--version"), 0);
}

TEST_F(Cli, GeodesicWritesTrajectory) {
    const auto cfg = write_config("geo.json", {{"A", {{1.0, 0.0}, {0.0, 1.0}}},
                                               {"start", {0.0, 0.0, 0.0}},
                                               {"velocity", {1.0, 0.0, 0.0}},
                                               {"length", 1.0},
                                               {"steps", 200}});
    ASSERT_EQ(run("geodesic --config " + cfg.string() + " --out " + dir.string() + " --seed 11"), 0);
    const auto csv = slurp(dir / "geodesic.csv");
    EXPECT_EQ(csv.substr(0, csv.find('\n')), "t,x1,x2,x3,v1,v2,v3");
    EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 202);
    const auto r = report(dir);
    EXPECT_EQ(r["config"]["seed"], 11);
    EXPECT_EQ(parse_geodesic(r["config"]).steps, 200);
}

TEST_F(Cli, MinimizeThenVerifyMesh) {
    const json circ = {{"R_in", 1.0}, {"h_in", 0.1}, {"R_out", 4.0}, {"h_out", 0.0}, {"n_seg", 32}, {"rings", 16}};
    const auto cfg = write_config("min.json", {{"A", {{1.0, 0.0}, {0.0, 1.0}}}, {"eps", 0.1}, {"circles", circ}});
    ASSERT_EQ(run("minimize --config " + cfg.string() + " --out " + (dir / "a").string()), 0);
    ASSERT_EQ(run("minimize --config " + cfg.string() + " --out " + (dir / "b").string()), 0);
    for (const char* f : {"report.json", "mesh.obj", "iterations.csv", "mean_curvature.csv"})
        EXPECT_EQ(slurp(dir / "a" / f), slurp(dir / "b" / f)) << f;

    const auto lem = write_config("lem.json", {{"A", {{1.0, 0.0}, {0.0, 1.0}}},
                                               {"H", 1.0},
                                               {"mode", "mesh"},
                                               {"mesh_path", (dir / "a" / "mesh.obj").string()}});
    ASSERT_EQ(run("verify-lemma --config " + lem.string() + " --out " + (dir / "c").string()), 0);
    const auto r = report(dir / "c");
    EXPECT_TRUE(r["passed"].get<bool>());
    EXPECT_TRUE(fs::exists(dir / "c" / "laplacian.csv"));
}

TEST_F(Cli, FailedCheckExitsOne) {
    const json circ = {{"R_in", 1.0}, {"h_in", 0.1}, {"R_out", 4.0}, {"h_out", 0.0}, {"n_seg", 32}, {"rings", 16}};
    const auto cfg = write_config("min.json", {{"A", {{1.0, 0.0}, {0.0, 1.0}}},
                                               {"eps", 0.1},
                                               {"circles", circ},
                                               {"tol_grad", 1e-300},
                                               {"max_iter", 1}});
    EXPECT_EQ(run("minimize --config " + cfg.string() + " --out " + dir.string()), 1);
    EXPECT_FALSE(report(dir)["passed"].get<bool>());
}

TEST_F(Cli, JetFuzzAndAnnulus) {
    const auto lem = write_config("lem.json", {{"A", {{0.0, 1.0}, {0.0, 0.0}}}, {"H", 0.0}, {"samples", 5000}});
    ASSERT_EQ(run("verify-lemma --config " + lem.string() + " --out " + (dir / "a").string()), 0);
    ASSERT_EQ(run("verify-lemma --config " + lem.string() + " --out " + (dir / "b").string()), 0);
    EXPECT_EQ(slurp(dir / "a" / "report.json"), slurp(dir / "b" / "report.json"));
    ASSERT_EQ(run("verify-lemma --config " + lem.string() + " --out " + (dir / "c").string() + " --seed 99"), 0);
    EXPECT_NE(slurp(dir / "a" / "report.json"), slurp(dir / "c" / "report.json"));

    const auto ann = write_config("ann.json", {{"circles", circles_json}});
    ASSERT_EQ(run("mesh make-annulus --config " + ann.string() + " --out " + dir.string()), 0);
    EXPECT_TRUE(fs::exists(dir / "annulus.obj"));
    EXPECT_TRUE(fs::exists(dir / "heights.csv"));
}

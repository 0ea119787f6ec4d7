#include <gtest/gtest.h>

#include <cmath>

#include "oracles.hpp"
#include "sdgeom/group.hpp"

using namespace sdgeom;

namespace {

double max_diff(const Mat2& x, const Mat2& y) { return oracle::max_abs(x - y); }

double norm3(const GroupPoint& p) { return std::sqrt(p.x1 * p.x1 + p.x2 * p.x2 + p.x3 * p.x3); }

GroupPoint random_point(Rng& rng, double r) { return {rng.uniform(-r, r), rng.uniform(-r, r), rng.uniform(-r, r)}; }

}  // namespace

TEST(Matrix2, RejectsNonFinite) {
    EXPECT_THROW(Matrix2(NAN, 0, 0, 0), Error);
    EXPECT_THROW(Matrix2(0, INFINITY, 0, 0), Error);
}

TEST(Matrix2, NegativeTraceIsFlipped) {
    const Matrix2 A(-1, 2, 0, -1);
    EXPECT_TRUE(A.flipped());
    EXPECT_EQ(A.trace(), 2.0);
    EXPECT_EQ(A.b(), -2.0);
    EXPECT_FALSE(Matrix2(1, 0, 0, -1).flipped());
}

TEST(ExpZA, ClosedFormExamples) {
    for (double z : {-3.0, -0.5, 0.0, 1e-9, 0.7, 2.5}) {
        const auto id = exp_zA(Matrix2::hyperbolic(), z).value;
        EXPECT_NEAR(max_diff(id, Mat2::identity() * std::exp(z)), 0.0, 1e-15 * std::exp(std::abs(z)));

        const auto nil = exp_zA(Matrix2::nil3(), z).value;
        EXPECT_DOUBLE_EQ(nil.a11, 1.0);
        EXPECT_DOUBLE_EQ(nil.a22, 1.0);
        EXPECT_DOUBLE_EQ(nil.a12, z);
        EXPECT_EQ(nil.a21, 0.0);

        const auto rot = exp_zA(Mat2{0, -1, 1, 0}, z).value;
        EXPECT_NEAR(rot.a11, std::cos(z), 1e-15);
        EXPECT_NEAR(rot.a12, -std::sin(z), 1e-15);
        EXPECT_NEAR(rot.a21, std::sin(z), 1e-15);

        const auto hyp = exp_zA(Mat2{1, 0, 0, -1}, z).value;
        EXPECT_NEAR(hyp.a11, std::exp(z), 1e-15 * std::exp(std::abs(z)));
        EXPECT_NEAR(hyp.a22, std::exp(-z), 1e-15 * std::exp(std::abs(z)));
    }
}

TEST(ExpZA, MatchesScalingAndSquaringOracle) {
    Rng rng(11);
    for (int s = 0; s < 5000; ++s) {
        const Mat2 A = oracle::random_matrix(rng, 3.0);
        const double z = rng.uniform(-5, 5);
        const Mat2 got = exp_zA(A, z).value;
        const Mat2 ref = oracle::expm(A * z);
        const double scale = std::exp(std::abs(z) * A.frobenius());
        ASSERT_LE(max_diff(got, ref), 1e-12 * scale) << "sample " << s;
    }
}

TEST(ExpZA, NearDegenerateDiscriminantIsSmooth) {
    // delta crosses zero: a Jordan block perturbed in both directions
    for (double eps : {-1e-6, -1e-10, -1e-14, 0.0, 1e-14, 1e-10, 1e-6}) {
        const Mat2 A{1.0, 1.0, eps, 1.0};
        for (double z : {0.3, 2.0, -4.0}) {
            const Mat2 ref = oracle::expm(A * z);
            EXPECT_LE(max_diff(exp_zA(A, z).value, ref), 1e-13 * oracle::max_abs(ref)) << eps << ' ' << z;
        }
    }
}

TEST(ExpZA, Homomorphism) {
    Rng rng(12);
    for (int s = 0; s < 10000; ++s) {
        const Mat2 A = oracle::random_matrix(rng, 3.0);
        const double u = rng.uniform(-5, 5), v = rng.uniform(-5, 5);
        const Mat2 X = exp_zA(A, u).value, Y = exp_zA(A, v).value;
        const Mat2 lhs = exp_zA(A, u + v).value;
        // each entry of X*Y is bounded by |X|_F |Y|_F
        ASSERT_LE(max_diff(lhs, X * Y), 1e-12 * X.frobenius() * Y.frobenius()) << "sample " << s;
    }
}

TEST(ExpZA, Determinant) {
    Rng rng(13);
    for (int s = 0; s < 10000; ++s) {
        const Mat2 A = oracle::random_matrix(rng, 3.0);
        const double z = rng.uniform(-5, 5);
        const Mat2 E = exp_zA(A, z).value;
        const double scale = std::abs(E.a11 * E.a22) + std::abs(E.a12 * E.a21);
        ASSERT_LE(std::abs(E.det() - std::exp(z * A.trace())), 1e-12 * scale) << "sample " << s;
    }
}

TEST(GroupLaw, IdentityAndInverse) {
    const Matrix2 A(0.4, -1.2, 0.7, 0.9);
    const GroupPoint p{1.5, -2.0, 0.75};
    EXPECT_EQ(multiply(p, {}, A), p);
    EXPECT_EQ(multiply({}, p, A), p);
    const auto e = multiply(p, inverse(p, A), A);
    EXPECT_NEAR(norm3(e), 0.0, 1e-14);
    const auto e2 = multiply(inverse(p, A), p, A);
    EXPECT_NEAR(norm3(e2), 0.0, 1e-14);
}

TEST(GroupLaw, Associativity) {
    Rng rng(14);
    for (int s = 0; s < 10000; ++s) {
        const Matrix2 A(oracle::random_matrix(rng, 3.0));
        const auto p = random_point(rng, 2.0), q = random_point(rng, 2.0), r = random_point(rng, 2.0);
        const auto lhs = multiply(multiply(p, q, A), r, A);
        const auto rhs = multiply(p, multiply(q, r, A), A);
        const double scale = 1.0 + norm3(p) + oracle::max_abs(exp_zA(A, p.x3).value) * norm3(q) +
                             oracle::max_abs(exp_zA(A, p.x3 + q.x3).value) * norm3(r);
        ASSERT_LE(norm3({lhs.x1 - rhs.x1, lhs.x2 - rhs.x2, lhs.x3 - rhs.x3}), 1e-11 * scale) << "sample " << s;
    }
}

TEST(GroupLaw, HalfTurnIsAutomorphism) {
    Rng rng(15);
    const Matrix2 A(0.3, 1.1, -0.4, 0.8);
    for (int s = 0; s < 100; ++s) {
        const auto p = random_point(rng, 2.0), q = random_point(rng, 2.0);
        const auto lhs = rotate_half_turn(multiply(p, q, A));
        const auto rhs = multiply(rotate_half_turn(p), rotate_half_turn(q), A);
        EXPECT_NEAR(lhs.x1, rhs.x1, 1e-13);
        EXPECT_NEAR(lhs.x2, rhs.x2, 1e-13);
        EXPECT_EQ(lhs.x3, rhs.x3);
    }
}

TEST(Frames, LeftFrameMatchesDifferentiatedGroupLaw) {
    Rng rng(16);
    for (int s = 0; s < 50; ++s) {
        const Matrix2 A(oracle::random_matrix(rng, 2.0));
        const auto p = random_point(rng, 1.5);
        const auto frame = left_frame_at(p, A);
        const auto ref = oracle::left_frame_by_differentiation(p, A);
        for (std::size_t j = 0; j < 3; ++j)
            for (std::size_t i = 0; i < 3; ++i) EXPECT_NEAR(frame[j][i], ref[j][i], 1e-8);
    }
}

TEST(Frames, RightFrameIsDerivativeOfLeftMultiplication) {
    Rng rng(17);
    const Matrix2 A(0.5, -0.3, 1.2, 0.1);
    for (int s = 0; s < 20; ++s) {
        const auto p = random_point(rng, 2.0);
        const auto F = right_frame_at(p, A);
        for (std::size_t j = 0; j < 3; ++j)
            for (std::size_t i = 0; i < 3; ++i) {
                auto comp = [&](double t) {
                    GroupPoint g{};
                    (j == 0 ? g.x1 : j == 1 ? g.x2 : g.x3) = t;
                    return multiply(g, p, A).coords()[i];
                };
                EXPECT_NEAR(F[j][i], oracle::derivative(comp, 0.0, 1e-4), 1e-9);
            }
        EXPECT_NEAR(F[2][0], A.a() * p.x1 + A.b() * p.x2, 1e-15);
        EXPECT_NEAR(F[2][1], A.c() * p.x1 + A.d() * p.x2, 1e-15);
        EXPECT_EQ(F[2][2], 1.0);
    }
}

TEST(Frames, Orthonormal) {
    Rng rng(18);
    for (int s = 0; s < 10000; ++s) {
        const Matrix2 A(oracle::random_matrix(rng, 3.0));
        const auto p = random_point(rng, 2.0);
        const auto F = left_frame_at(p, A);
        const auto g = metric_at(p, A);
        for (std::size_t i = 0; i < 3; ++i)
            for (std::size_t j = 0; j < 3; ++j) {
                double scale = 0.0;
                for (std::size_t k = 0; k < 3; ++k)
                    for (std::size_t l = 0; l < 3; ++l) scale += std::abs(F[i][k] * g.g[k][l] * F[j][l]);
                ASSERT_LE(std::abs(g.inner(F[i], F[j]) - (i == j ? 1.0 : 0.0)), 1e-12 * scale) << "sample " << s;
            }
    }
}

TEST(Metric, LeftInvariant) {
    Rng rng(19);
    for (int s = 0; s < 200; ++s) {
        const Matrix2 A(oracle::random_matrix(rng, 2.0));
        const auto g = random_point(rng, 1.0), p = random_point(rng, 1.0);
        const CoordVector u{rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)};
        const CoordVector w{rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)};
        const auto gp = multiply(g, p, A);
        const double lhs = metric_at(gp, A).inner(left_translate_vector(g, u, A), left_translate_vector(g, w, A));
        const double rhs = metric_at(p, A).inner(u, w);
        EXPECT_NEAR(lhs, rhs, 1e-11 * (1.0 + std::abs(rhs)));
    }
}

TEST(Metric, LeftTranslationDifferentialMatchesFiniteDifferences) {
    Rng rng(20);
    for (int s = 0; s < 200; ++s) {
        const Matrix2 A(oracle::random_matrix(rng, 2.0));
        const auto g = random_point(rng, 1.0), p = random_point(rng, 1.0);
        const CoordVector u{rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)};
        const auto dl = left_translate_vector(g, u, A);
        for (std::size_t k = 0; k < 3; ++k) {
            auto f = [&](double t) {
                const auto q = multiply(g, {p.x1 + t * u[0], p.x2 + t * u[1], p.x3 + t * u[2]}, A);
                return q.coords()[k];
            };
            EXPECT_NEAR(oracle::derivative(f, 0.0, 1e-3), dl[k], 1e-6);
        }
    }
}

TEST(Metric, BlockDerivativeMatchesFiniteDifference) {
    const Matrix2 A(0.7, 1.3, -0.2, 0.4);
    for (double x3 : {-1.0, 0.0, 0.6}) {
        const Mat2 d = metric_block_derivative(x3, A);
        auto entry = [&](int k) {
            return [&, k](double t) {
                const Mat2 g = metric_block(t, A);
                return k == 0 ? g.a11 : k == 1 ? g.a12 : k == 2 ? g.a21 : g.a22;
            };
        };
        EXPECT_NEAR(d.a11, oracle::derivative(entry(0), x3, 1e-3), 1e-9);
        EXPECT_NEAR(d.a12, oracle::derivative(entry(1), x3, 1e-3), 1e-9);
        EXPECT_NEAR(d.a21, oracle::derivative(entry(2), x3, 1e-3), 1e-9);
        EXPECT_NEAR(d.a22, oracle::derivative(entry(3), x3, 1e-3), 1e-9);
    }
}

TEST(Metric, FrameCoordinateConversionRoundTrip) {
    const Matrix2 A(0.2, 0.9, -1.1, 0.3);
    const GroupPoint p{0.4, -1.0, 0.8};
    const FrameVector v{0.3, -0.7, 1.9};
    const auto back = coord_to_frame(frame_to_coord(v, p, A), p, A);
    for (std::size_t i = 0; i < 3; ++i) EXPECT_NEAR(back[i], v[i], 1e-14);
    EXPECT_NEAR(metric_at(p, A).norm(frame_to_coord(v, p, A)), frame_norm(v), 1e-14);
}

TEST(Constants, Examples) {
    EXPECT_EQ(group_constants(Matrix2::nil3()).H0, 0.0);
    EXPECT_TRUE(group_constants(Matrix2::nil3()).unimodular);
    EXPECT_EQ(group_constants(Matrix2::hyperbolic()).H0, 1.0);
    EXPECT_FALSE(group_constants(Matrix2::hyperbolic()).unimodular);
    EXPECT_TRUE(group_constants(Matrix2::euclidean()).unimodular);
    EXPECT_EQ(group_constants(Matrix2(-2, 0, 0, -4)).H0, 3.0);
}

TEST(Constants, SafeRange) {
    EXPECT_TRUE(metric_in_safe_range({0, 0, 10}, Matrix2::hyperbolic()));
    EXPECT_FALSE(metric_in_safe_range({0, 0, 20}, Matrix2::hyperbolic()));
    EXPECT_TRUE(metric_in_safe_range({0, 0, 1e6}, Matrix2::nil3()));
}

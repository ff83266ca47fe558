#include "gramlab/direction_solver.hpp"
#include "gramlab/influence.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace gramlab;

namespace {

// Plain bisection on u for sup{u : r(u) <= 0}, independent of the hybrid logic.
double bisection_root(const Vector& p, double lambda, int steps = 200) {
    double lo = 0.0;
    double hi = 1.0 / p.array().square().mean();
    while (r_lambda(p, lambda, hi) <= 0) hi *= 2;
    for (int i = 0; i < steps; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        (r_lambda(p, lambda, mid) <= 0 ? lo : hi) = mid;
    }
    return hi;
}

Vector normals(std::mt19937_64& rng, int n, double scale = 1.0) {
    std::normal_distribution<double> z(0.0, scale);
    Vector p(n);
    for (int i = 0; i < n; ++i) p(i) = z(rng);
    return p;
}

}  // namespace

TEST(RLambda, AtOriginAndConstantSquares) {
    Vector p(4);
    p << 1, -2, 3, 0.5;
    for (double lam : {0.01, 0.3, 1.0, 5.0}) {
        EXPECT_NEAR(r_lambda(p, lam, 0.0), -psi(lam) / lam, 1e-15);
        EXPECT_LT(r_lambda(p, lam, 0.0), 0.0);
    }
    Vector c = Vector::Constant(7, 2.0);
    c(3) = -2.0;
    EXPECT_EQ(r_lambda(c, 0.4, 0.25), 0.0);
}

TEST(RLambda, LimitCountsZeros) {
    Vector p(5);
    p << 0, 1, 0, -2, 3;
    const double lam = 0.5;
    const double expected = (3 * std::log(2.0) - 2 * psi(lam)) / (5 * lam);
    EXPECT_NEAR(r_lambda_limit(p, lam), expected, 1e-15);
    EXPECT_NEAR(r_lambda(p, lam, 1e12), expected, 1e-15);
}

TEST(RLambda, NonDecreasingInU) {
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> unif(0.0, 20.0);
    for (int t = 0; t < 50; ++t) {
        const Vector p = normals(rng, 30);
        const double lam = 0.05 + 0.1 * t;
        std::vector<double> us(200);
        for (auto& u : us) u = unif(rng);
        std::sort(us.begin(), us.end());
        for (size_t i = 1; i < us.size(); ++i) {
            EXPECT_LE(r_lambda(p, lam, us[i - 1]), r_lambda(p, lam, us[i]) + 1e-15);
        }
    }
}

TEST(SolveS, ConstantSquares) {
    const Vector p = (Vector(6) << 2, -2, 2, 2, -2, 2).finished();
    const auto est = solve_S(p, 0.3);
    EXPECT_FALSE(est.alpha_infinite);
    EXPECT_NEAR(est.value, 4.0, 4e-10);
}

TEST(SolveS, AllZeroProjections) {
    const auto est = solve_S(Vector::Zero(8), 0.3);
    EXPECT_TRUE(est.alpha_infinite);
    EXPECT_EQ(est.value, 0.0);
}

TEST(SolveS, ZeroLimitReturnsZeroEnergy) {
    // Mostly zeros at large lambda: the limit of the criterion is negative.
    Vector p = Vector::Zero(10);
    p(0) = 1.0;
    ASSERT_LE(r_lambda_limit(p, 1.0), 0.0);
    const auto est = solve_S(p, 1.0);
    EXPECT_TRUE(est.alpha_infinite);
    EXPECT_EQ(est.value, 0.0);
}

TEST(SolveS, TinyPositiveLimitStaysPositive) {
    // One nonzero among many zeros with lambda chosen so the limit is barely positive.
    Vector p = Vector::Zero(3);
    p(0) = 1.0;
    // log 2 - 2 psi(lam) > 0 iff psi(lam) < log(2)/2.
    const double lam = 0.9 * (1.0 - std::sqrt(std::sqrt(2.0) - 1.0));
    ASSERT_GT(r_lambda_limit(p, lam), 0.0);
    const auto est = solve_S(p, lam);
    EXPECT_FALSE(est.alpha_infinite);
    EXPECT_GT(est.value, 0.0);
}

TEST(SolveS, AgreesWithBisectionOnGaussianData) {
    std::mt19937_64 rng(2024);
    const Vector p = normals(rng, 50);
    const auto est = solve_S(p, 0.1);
    const double u = bisection_root(p, 0.1);
    EXPECT_NEAR(est.u, u, 1e-8 * u);
    EXPECT_NEAR(est.value, 1.0 / u, 1e-8 / u);
}

TEST(SolveS, ResidualAndBracketInvariants) {
    std::mt19937_64 rng(7);
    std::uniform_int_distribution<int> nd(5, 200);
    std::uniform_real_distribution<double> ld(-3.0, 0.0);
    for (int t = 0; t < 300; ++t) {
        const int n = nd(rng);
        const double lam = std::pow(10.0, ld(rng));
        Vector p = normals(rng, n, std::exp(ld(rng)));
        if (t % 3 == 0) p = p.array().cube();  // heavier tails
        const auto est = solve_S(p, lam);
        ASSERT_FALSE(est.alpha_infinite);
        const double r0 = std::abs(r_lambda(p, lam, 0.0));
        EXPECT_LE(est.residual, 1e-8 * std::max(1.0, r0));
        EXPECT_NEAR(est.residual, std::abs(r_lambda(p, lam, est.u)), 1e-15);
        EXPECT_GE(est.u, est.lo);
        EXPECT_LE(est.u, est.hi);
        EXPECT_LE(r_lambda(p, lam, est.lo), 0.0);
        EXPECT_GT(r_lambda(p, lam, est.hi), 0.0);
        EXPECT_LE(est.hi - est.lo, std::ldexp(est.initial_hi - est.initial_lo, -est.iterations));
        EXPECT_LE(est.hi - est.lo, 1e-10 * est.hi);
        const double ub = bisection_root(p, lam);
        EXPECT_NEAR(est.u, ub, 1e-8 * ub) << "n=" << n << " lambda=" << lam;
    }
}

TEST(SolveS, PlateauResolvesToSupremum) {
    // Saturated summands cancel over an interval of u; the estimator is the
    // right end of the zero set.
    const Vector p = (Vector(2) << 1.0, 10.0).finished();
    const double lam = 50.0;
    const auto est = solve_S(p, lam);
    const double u = bisection_root(p, lam);
    EXPECT_NEAR(est.u, u, 1e-9 * u);
    EXPECT_EQ(r_lambda(p, lam, 0.5 * est.u), 0.0);
}

TEST(SolveS, IterationLimitReportsBracket) {
    std::mt19937_64 rng(9);
    const Vector p = normals(rng, 40);
    SolverConfig cfg;
    cfg.max_iter = 1;
    cfg.rel_tol = 1e-300;
    try {
        solve_S(p, 0.2, cfg);
        FAIL() << "expected SolverFailure";
    } catch (const SolverFailure& e) {
        EXPECT_LT(e.lo, e.hi);
        EXPECT_LE(r_lambda(p, 0.2, e.lo), 0.0);
        EXPECT_GT(r_lambda(p, 0.2, e.hi), 0.0);
    }
}

TEST(SolveS, RejectsBadInput) {
    const Vector p = Vector::Ones(3);
    EXPECT_THROW(solve_S(p, 0.0), InvalidInput);
    EXPECT_THROW(solve_S(p, -1.0), InvalidInput);
    EXPECT_THROW(solve_S(Vector(0), 1.0), InvalidInput);
    Vector bad = p;
    bad(1) = std::nan("");
    EXPECT_THROW(solve_S(bad, 1.0), InvalidInput);
    SolverConfig cfg;
    cfg.rel_tol = 0;
    EXPECT_THROW(solve_S(p, 1.0, cfg), InvalidInput);
}

TEST(AdaptiveLambda, ClosedForm) {
    const Vector p = (Vector(4) << 1, 2, 3, 4).finished();
    // m = 7.5, v = 32.25; at eps = 0.5, t = (2/4) log 2.
    const double t = 0.5 * std::log(2.0);
    EXPECT_NEAR(adaptive_lambda(p, 0.5), 7.5 * std::sqrt(t * (1 - t) / 32.25), 1e-15);
}

TEST(AdaptiveLambda, SampleTooSmallForConfidence) {
    const Vector p = (Vector(4) << 1, 2, 3, 4).finished();
    // (2/4) log 10 > 1.
    EXPECT_THROW(adaptive_lambda(p, 0.1), InvalidInput);
    EXPECT_THROW(adaptive_lambda(Vector::Ones(1), 0.5), InvalidInput);
}

TEST(AdaptiveLambda, ZeroVarianceFallback) {
    const Vector p = (Vector(5) << 3, -3, 3, 3, -3).finished();
    EXPECT_DOUBLE_EQ(adaptive_lambda(p, 0.5), 1.0 / 18.0);
    EXPECT_NEAR(robust_energy(p, 0.5).value, 9.0, 1e-8);
}

TEST(AdaptiveLambda, VanishesAsConfidenceLoosens) {
    std::mt19937_64 rng(4);
    const Vector p = normals(rng, 100);
    double prev = adaptive_lambda(p, 0.5);
    for (double eps : {0.9, 0.99, 0.999999}) {
        const double lam = adaptive_lambda(p, eps);
        EXPECT_LT(lam, prev);
        EXPECT_GT(lam, 0.0);
        prev = lam;
    }
    EXPECT_LT(prev, 1e-2);
}

TEST(EstimateDirection, OrthogonalDirectionIsZero) {
    Sample s{Matrix(5, 2)};
    s.x << 1, 0, 2, 0, -1, 0, 3, 0, 0.5, 0;
    const auto est = estimate_direction(s, (Vector(2) << 0, 1).finished(), 0.5);
    EXPECT_TRUE(est.alpha_infinite);
    EXPECT_EQ(est.value, 0.0);
}

TEST(EstimateDirection, RepeatedRow) {
    Sample s{Matrix(6, 3)};
    for (int i = 0; i < 6; ++i) s.x.row(i) << 1, 2, -1;
    Vector theta(3);
    theta << 2, 0, 0;  // <theta, x0> = 2
    EXPECT_NEAR(estimate_direction(s, theta, 0.3).value, 4.0, 4e-10);
}

TEST(EstimateDirection, ScaleEquivariance) {
    std::mt19937_64 rng(17);
    std::normal_distribution<double> z;
    Sample s{Matrix(300, 3)};
    for (int i = 0; i < 300; ++i)
        for (int j = 0; j < 3; ++j) s.x(i, j) = z(rng) * (j + 1);
    for (int t = 0; t < 20; ++t) {
        Vector theta(3);
        for (int j = 0; j < 3; ++j) theta(j) = z(rng);
        const double base = estimate_direction(s, theta).value;
        EXPECT_NEAR(estimate_direction(s, 2.0 * theta).value / base, 4.0, 4e-10);
        for (double f : {0.5, 2.0, 10.0}) {
            EXPECT_NEAR(estimate_direction(s, f * theta).value / base, f * f, 1e-9 * f * f);
        }
    }
}

TEST(EstimateDirection, FixedLambdaMatchesSolveS) {
    std::mt19937_64 rng(23);
    std::normal_distribution<double> z;
    Sample s{Matrix(80, 2)};
    for (int i = 0; i < 80; ++i) s.x.row(i) << z(rng), z(rng);
    const Vector theta = (Vector(2) << 0.3, -1.2).finished();
    const Vector p = s.x * theta;
    EXPECT_EQ(estimate_direction_fixed(s, theta, 0.2).value, solve_S(p, 0.2).value);
    EXPECT_THROW(estimate_direction(s, Vector::Ones(3)), InvalidInput);
}

TEST(EstimateDirection, ZeroLaw) {
    std::mt19937_64 rng(31);
    for (int t = 0; t < 50; ++t) {
        Vector p = normals(rng, 20);
        EXPECT_GT(robust_energy(p).value, 0.0);
    }
    EXPECT_EQ(robust_energy(Vector::Zero(20)).value, 0.0);
}

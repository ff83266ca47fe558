#include "gramlab/bounds.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>

using namespace gramlab;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Expected values below were produced by an independent 30-digit evaluation.
constexpr double kLambda = 0.024627566233771642;
constexpr double kMu = 0.28516045245842437;
constexpr double kDeltaHat = 0.66365912542996834;
constexpr double kGammaMinus = 0.00020217233953293638;
constexpr double kNMin = 3910.6207574715534;

}  // namespace

TEST(CoreBounds, ReferencePoint) {
    const auto r = core_bounds({3.0, 2, 10000, 0.01});
    EXPECT_NEAR(r.lambda, kLambda, 1e-14);
    EXPECT_NEAR(r.mu, kMu, 1e-14);
    EXPECT_NEAR(r.delta_hat, kDeltaHat, 1e-13);
    EXPECT_NEAR(r.gamma_minus, kGammaMinus, 1e-17);
    EXPECT_NEAR(r.n_min, kNMin, 1e-9);
    EXPECT_TRUE(r.feasible);
    EXPECT_NEAR(r.lambda, 0.024628, 1e-6);
    EXPECT_NEAR(r.n_min, 3910.6, 0.05);
}

TEST(CoreBounds, SmallSampleInfeasible) {
    const auto r = core_bounds({3.0, 2, 1000, 0.01});
    EXPECT_FALSE(r.feasible);
    EXPECT_TRUE(r.delta_hat_infinite());
}

TEST(CoreBounds, DeltaHatInfiniteExactlyWhenMuAtLeastHalf) {
    for (std::int64_t n : {10, 100, 1000, 3000, 5000, 20000, 100000}) {
        const auto r = core_bounds({3.0, 2, n, 0.01});
        EXPECT_EQ(r.delta_hat_infinite(), r.mu >= 0.5) << n;
        if (!r.delta_hat_infinite()) EXPECT_NEAR(r.delta_hat, r.mu / (1 - 2 * r.mu), 1e-15);
    }
}

TEST(CoreBounds, FeasibleButDeltaHatAboveOneIsReported) {
    // n = 5000 clears n_min while mu is close to 1/2.
    const auto r = core_bounds({3.0, 2, 5000, 0.01});
    EXPECT_TRUE(r.feasible);
    EXPECT_GT(r.delta_hat, 1.0);
}

TEST(CoreBounds, RejectsBadInput) {
    EXPECT_THROW(core_bounds({1.0, 2, 100, 0.01}), InvalidInput);
    EXPECT_THROW(core_bounds({0.5, 2, 100, 0.01}), InvalidInput);
    EXPECT_THROW(core_bounds({3.0, 0, 100, 0.01}), InvalidInput);
    EXPECT_THROW(core_bounds({3.0, 2, 0, 0.01}), InvalidInput);
    EXPECT_THROW(core_bounds({3.0, 2, 100, 0.5}), InvalidInput);
    EXPECT_THROW(core_bounds({3.0, 2, 100, 0.0}), InvalidInput);
}

TEST(CoreBounds, MonotoneInSampleSizeAndConfidence) {
    const double epss[] = {0.2, 0.1, 0.05, 0.01, 0.001};
    for (double kappa : {1.5, 3.0, 10.0}) {
        for (int d : {1, 3, 10}) {
            for (double eps : epss) {
                BoundsReport prev = core_bounds({kappa, d, 100, eps});
                for (std::int64_t n = 200; n <= 1000000; n *= 2) {
                    const auto r = core_bounds({kappa, d, n, eps});
                    EXPECT_LT(r.lambda, prev.lambda);
                    EXPECT_LT(r.mu, prev.mu);
                    EXPECT_LT(r.gamma_minus, prev.gamma_minus);
                    prev = r;
                }
            }
            for (std::int64_t n : {100, 10000}) {
                BoundsReport prev = core_bounds({kappa, d, n, epss[0]});
                for (int i = 1; i < 5; ++i) {
                    const auto r = core_bounds({kappa, d, n, epss[i]});
                    EXPECT_GT(r.lambda, prev.lambda);
                    EXPECT_GT(r.mu, prev.mu);
                    EXPECT_GT(r.gamma_minus, prev.gamma_minus);
                    prev = r;
                }
            }
        }
    }
}

TEST(CoreBounds, NonNegativeWhenFeasible) {
    for (std::int64_t n : {5000, 20000, 1000000}) {
        const auto r = core_bounds({3.0, 2, n, 0.01});
        ASSERT_TRUE(r.feasible);
        EXPECT_GE(r.lambda, 0);
        EXPECT_GE(r.mu, 0);
        EXPECT_GE(r.delta_hat, 0);
        EXPECT_GE(r.gamma_minus, 0);
        EXPECT_GE(r.n_min, 0);
    }
}

TEST(CovarianceBounds, ReferencePoint) {
    const auto r = covariance_bounds({3.0, 2, 100000, 0.01});
    EXPECT_NEAR(r.lambda, 0.0045852295169402294, 1e-15);
    EXPECT_NEAR(r.mu, 0.17375516026221707, 1e-14);
    EXPECT_NEAR(r.delta_hat, 0.26629564532250011, 1e-14);
    EXPECT_NEAR(r.n_min, 14112.964669697135, 1e-8);
}

TEST(RegressionBounds, ReferencePoint) {
    const auto r = regression_bounds(3.0, 3.0, 2, 100000, 0.01);
    EXPECT_NEAR(r.lambda, 0.0035149473514712438, 1e-15);
    EXPECT_NEAR(r.mu, 0.2213958959874665, 1e-14);
    EXPECT_NEAR(r.delta_hat, 0.39733064373220182, 1e-14);
    EXPECT_NEAR(r.gamma_minus, 4.1182849612049038e-6, 1e-18);
    EXPECT_NEAR(r.n_min, 22838.061557618947, 1e-8);
    EXPECT_TRUE(r.feasible);
    EXPECT_NEAR(excess_risk_factor(r.delta_hat),
                r.delta_hat * r.delta_hat / ((1 - r.delta_hat) * (1 - r.delta_hat)), 1e-15);
}

TEST(RegressionBounds, DeltaHatVanishesAsSampleGrows) {
    double prev = kInf;
    for (std::int64_t n = 100000; n <= 100000000000LL; n *= 10) {
        const auto r = regression_bounds(3.0, 3.0, 2, n, 0.01);
        EXPECT_LT(r.delta_hat, prev);
        prev = r.delta_hat;
    }
    EXPECT_LT(prev, 0.01);
}

TEST(RegressionBounds, DegenerateKurtosisFlaggedNotRaised) {
    const auto r = regression_bounds(1.0, 0.0, 2, 1000, 0.01);
    EXPECT_FALSE(r.feasible);
    EXPECT_TRUE(r.delta_hat_infinite());
}

TEST(GammaPlus, RadiusForm) {
    const auto r = core_bounds({3.0, 2, 10000, 0.01});
    EXPECT_NEAR(gamma_plus(r, 2.0), kGammaMinus * 16 * (1 + kDeltaHat) * (1 + kDeltaHat), 1e-15);
}

TEST(GammaPlus, GaussianMomentsClosedForm) {
    EXPECT_DOUBLE_EQ(gaussian_norm_moment(2, 3), 48.0);
    EXPECT_DOUBLE_EQ(gaussian_norm_moment(2, 6), 46080.0);
    EXPECT_DOUBLE_EQ(gaussian_norm_moment(3, 1), 3.0);
    EXPECT_DOUBLE_EQ(gaussian_norm_moment(5, 0), 1.0);
}

TEST(GammaPlus, GaussianReferenceValues) {
    const BoundsInput in{3.0, 2, 10000, 0.01};
    const double dh = core_bounds(in).delta_hat;
    MomentInputs m;
    m.p = 2.0;
    m.q = 2.0;
    m.moment_2p2 = gaussian_norm_moment(2, 3);
    m.moment_4p4 = gaussian_norm_moment(2, 6);
    m.moment_2qp1 = gaussian_norm_moment(2, 6);
    m.exp_p = 1.0;
    m.exp_rate = 0.5;
    m.exp_offset = -(2 / 0.5) * (std::log(1 - 0.5) + 0.5);
    m.moment_exp = 2.0;
    const auto v = gamma_plus_variants(in, m, dh);
    ASSERT_TRUE(v.chebyshev && v.truncated_mean && v.exponential);
    EXPECT_NEAR(*v.chebyshev, 0.064667883531680916, 1e-15);
    EXPECT_NEAR(*v.truncated_mean, 0.064667883531680916, 1e-15);
    EXPECT_NEAR(*v.exponential, 1.8846247228766422, 1e-13);
}

TEST(GammaPlus, JensenFloor) {
    const BoundsInput in{3.0, 2, 10000, 0.01};
    const double dh = core_bounds(in).delta_hat;
    const int d = 2;
    MomentInputs m;
    m.p = 2.0;
    m.moment_2p2 = std::pow(d, 3.0);
    m.moment_4p4 = std::pow(d, 6.0);
    const double value = gamma_plus_chebyshev(in, m, dh);
    const double floor = (1.0 / 3.0) * (2 * log_confidence_term(0.01, d) / (3 * 2.0 * 10000)) *
                         std::pow((1 + dh) * d - 1, 3.0) * (1 + 1 / std::sqrt(10000 * 0.01));
    EXPECT_GE(value, floor);
}

TEST(GammaPlus, VanishWithSampleSize) {
    MomentInputs m;
    m.p = 1.5;
    m.q = 1.5;
    m.moment_2p2 = 20;
    m.moment_4p4 = 900;
    m.moment_2qp1 = 90;
    m.exp_p = 0.5;
    m.exp_rate = 1.0;
    m.exp_offset = 1.0;
    double prev[3] = {kInf, kInf, kInf};
    double first[3] = {0, 0, 0};
    for (std::int64_t n = 10000; n <= 10000000000LL; n *= 10) {
        const BoundsInput in{3.0, 2, n, 0.01};
        const auto v = gamma_plus_variants(in, m, core_bounds(in).delta_hat);
        const double cur[3] = {*v.exponential, *v.chebyshev, *v.truncated_mean};
        for (int i = 0; i < 3; ++i) {
            EXPECT_LT(cur[i], prev[i]);
            if (n == 10000) first[i] = cur[i];
            prev[i] = cur[i];
        }
    }
    for (int i = 0; i < 3; ++i) EXPECT_LT(prev[i], 1e-3 * first[i]);
}

TEST(GammaPlus, MissingMomentsRejected) {
    const BoundsInput in{3.0, 2, 10000, 0.01};
    MomentInputs m;
    EXPECT_THROW(gamma_plus_chebyshev(in, m, 0.5), InvalidInput);
    EXPECT_THROW(gamma_plus_truncated_mean(in, m, 0.5), InvalidInput);
    EXPECT_THROW(gamma_plus_exponential(in, m, 0.5), InvalidInput);
    const auto v = gamma_plus_variants(in, m, 0.5);
    EXPECT_FALSE(v.exponential || v.chebyshev || v.truncated_mean);
}

TEST(GammaPlus, ExponentRangesEnforced) {
    const BoundsInput in{3.0, 2, 10000, 0.01};
    MomentInputs m;
    m.moment_2p2 = 1;
    m.moment_4p4 = 1;
    m.p = 1.0;  // the fourth-moment variant needs p > 1
    EXPECT_THROW(gamma_plus_chebyshev(in, m, 0.5), InvalidInput);
}

TEST(GaussianEta, NonNegative) {
    for (int d : {1, 2, 5, 50}) {
        for (double a = 0.01; a < 1.0; a += 0.01) {
            EXPECT_GE(-(d / a) * (std::log(1 - a) + a), 0.0);
        }
    }
}

TEST(Cq, EndpointsAndInterior) {
    EXPECT_DOUBLE_EQ(cq_constant(1.0), 1.0);
    EXPECT_DOUBLE_EQ(cq_constant(2.0), 1.0);
    EXPECT_NEAR(cq_constant(1.5), 1.3747296369986026, 1e-14);
    EXPECT_LE(cq_constant(1.5), 1.4);
    EXPECT_THROW(cq_constant(0.99), InvalidInput);
    EXPECT_THROW(cq_constant(2.01), InvalidInput);
}

TEST(Cq, GridMaximumAndContinuity) {
    double best = 0;
    for (int i = 0; i <= 100; ++i) best = std::max(best, cq_constant(1.0 + i / 100.0));
    EXPECT_LE(best, 1.4 + 1e-9);
    EXPECT_NEAR(cq_constant(1.0 + 1e-6), 1.0, 1e-3);
    EXPECT_NEAR(cq_constant(2.0 - 1e-6), 1.0, 1e-3);
}

TEST(TruncatedMean, ReferenceValues) {
    EXPECT_NEAR(truncated_mean_bound(1, 1, 2, 100, 0.05), 1 + 1 / std::sqrt(5.0), 1e-15);
    EXPECT_NEAR(truncated_mean_bound(1, 1, 2, 100, 0.05), 1.447214, 1e-6);
    EXPECT_DOUBLE_EQ(truncated_mean_bound(0.7, 0, 1.5, 100, 0.05), 0.7);
    EXPECT_NEAR(truncated_mean_bound(2, 2, 1, 100, 0.05), 2 + 2 / 0.05, 1e-12);
    EXPECT_THROW(truncated_mean_bound(1, 1, 2.5, 100, 0.05), InvalidInput);
}

TEST(TruncatedMean, JensenCheck) {
    EXPECT_TRUE(moments_jensen_consistent(2, 4, 2));
    EXPECT_FALSE(moments_jensen_consistent(2, 3, 2));
}

TEST(Kurtosis, ShiftAndSplit) {
    EXPECT_NEAR(kurtosis_shift(3), 7.464101615137754, 1e-14);
    EXPECT_DOUBLE_EQ(kurtosis_shift(1), 4);
    EXPECT_DOUBLE_EQ(kurtosis_shift(9), 16);
    EXPECT_NEAR(kurtosis_split(3, 3), 12, 1e-14);
    EXPECT_DOUBLE_EQ(kurtosis_split(5, 0), 5);
    EXPECT_DOUBLE_EQ(kurtosis_split(1, 1), 4);
}

TEST(Kurtosis, SplitDominatesExtendedVariableForGaussianModel) {
    // Y = <theta*, X> + noise with X, noise Gaussian: kurtosis of the extended
    // variable along any direction is at most (sqrt(k1)+sqrt(k2))^2.
    std::mt19937_64 rng(11);
    std::normal_distribution<double> z;
    const int n = 1000000, d = 2;
    Matrix ext(n, d + 1);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < d; ++j) ext(i, j) = z(rng);
        ext(i, d) = -(ext(i, 0) - 2 * ext(i, 1) + 0.5 * z(rng));
    }
    auto kurt = [&](const Vector& th, const Matrix& m) {
        const Vector p = m * th;
        return p.array().pow(4).mean() / std::pow(p.array().square().mean(), 2);
    };
    double k1 = 0;
    std::mt19937_64 dir(5);
    for (int t = 0; t < 200; ++t) {
        Vector th(d);
        for (int j = 0; j < d; ++j) th(j) = z(dir);
        k1 = std::max(k1, kurt(th, ext.leftCols(d)));
    }
    Vector noise_dir = Vector::Zero(d + 1);
    noise_dir << 1, -2, 1;
    const double k2 = kurt(noise_dir, ext);
    const double bound = kurtosis_split(k1, k2);
    for (int t = 0; t < 200; ++t) {
        Vector th(d + 1);
        for (int j = 0; j <= d; ++j) th(j) = z(dir);
        EXPECT_LE(kurt(th, ext), bound * 1.02);
    }
}

TEST(RateConstant, IndependentNoiseGivesVarianceTimesDimension) {
    std::mt19937_64 rng(3);
    std::normal_distribution<double> z;
    const int n = 400000, d = 3;
    const double sigma = 1.5;
    LabeledSample s{Matrix(n, d), Vector(n)};
    Vector theta(d);
    theta << 1, -1, 2;
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < d; ++j) s.x(i, j) = z(rng);
        s.y(i) = s.x.row(i).dot(theta) + sigma * z(rng);
    }
    const double c = exact_rate_constant(s, theta, Matrix::Identity(d, d));
    EXPECT_NEAR(c / (sigma * sigma * d), 1.0, 0.02);
}

TEST(RateConstant, UsesPseudoInverseOnImage) {
    LabeledSample s{Matrix(2, 2), Vector(2)};
    s.x << 1, 0, -1, 0;
    s.y << 2, 0;
    Matrix g = Matrix::Zero(2, 2);
    g(0, 0) = 4;
    Vector theta = Vector::Zero(2);
    // residuals 2, 0; ||G^{-1/2}x||^2 = 1/4.
    EXPECT_NEAR(exact_rate_constant(s, theta, g), 0.5 * 4 * 0.25, 1e-15);
}

TEST(ExcessFactor, Values) {
    EXPECT_EQ(excess_risk_factor(0.0), 0.0);
    EXPECT_NEAR(excess_risk_factor(0.5), 1.0, 1e-15);
    EXPECT_TRUE(std::isinf(excess_risk_factor(1.0)));
}

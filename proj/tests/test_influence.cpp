#include "gramlab/influence.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <vector>

using namespace gramlab;

namespace {

std::vector<double> grid(double lo, double hi, int points) {
    std::vector<double> xs(points);
    for (int i = 0; i < points; ++i) xs[i] = lo + (hi - lo) * i / (points - 1);
    return xs;
}

}  // namespace

TEST(Psi, ReferenceValues) {
    EXPECT_DOUBLE_EQ(psi(1.0), std::log(2.0));
    EXPECT_EQ(psi(0.0), 0.0);
    EXPECT_NEAR(psi(0.5), -std::log(0.625), 1e-15);
    EXPECT_NEAR(psi(0.5), 0.470004, 1e-6);
    EXPECT_DOUBLE_EQ(psi(7.0), std::log(2.0));
    EXPECT_DOUBLE_EQ(psi(-7.0), -std::log(2.0));
}

TEST(Psi, BranchesAgreeAtOne) {
    EXPECT_DOUBLE_EQ(-std::log(1.0 - 1.0 + 0.5), std::log(2.0));
    EXPECT_DOUBLE_EQ(psi(std::nextafter(1.0, 0.0)), std::log(2.0));
}

TEST(Psi, RejectsNonFinite) {
    EXPECT_THROW(psi(std::numeric_limits<double>::infinity()), InvalidInput);
    EXPECT_THROW(psi(std::numeric_limits<double>::quiet_NaN()), InvalidInput);
    EXPECT_THROW(psi_prime(std::numeric_limits<double>::quiet_NaN()), InvalidInput);
}

TEST(Psi, SandwichOddMonotoneBounded) {
    const auto xs = grid(-10.0, 10.0, 20001);
    double prev = -std::numeric_limits<double>::infinity();
    for (double x : xs) {
        const double v = psi(x);
        EXPECT_LE(-std::log(1.0 - x + 0.5 * x * x), v + 1e-15) << x;
        EXPECT_LE(v, std::log(1.0 + x + 0.5 * x * x) + 1e-15) << x;
        EXPECT_EQ(psi(-x), -v) << x;
        EXPECT_GE(v, prev) << x;
        EXPECT_LE(std::abs(v), std::log(2.0)) << x;
        prev = v;
    }
}

TEST(PsiPrime, ReferenceValues) {
    EXPECT_DOUBLE_EQ(psi_prime(0.0), 1.0);
    EXPECT_EQ(psi_prime(2.0), 0.0);
    EXPECT_EQ(psi_prime(-2.0), 0.0);
    EXPECT_NEAR(psi_prime(-0.5), 0.8, 1e-15);
    EXPECT_EQ(psi_prime(-0.5), psi_prime(0.5));
}

TEST(PsiPrime, MatchesCentralDifference) {
    const double h = 1e-5;
    for (double x : grid(-3.0, 3.0, 6001)) {
        if (std::abs(std::abs(x) - 1.0) < 2 * h) continue;
        const double fd = (psi(x + h) - psi(x - h)) / (2 * h);
        EXPECT_NEAR(fd, psi_prime(x), 1e-6) << x;
    }
}

TEST(Gap, ReferenceValues) {
    EXPECT_EQ(psi_gap(0.0), 0.0);
    EXPECT_NEAR(psi_gap(1.0), 1.0 - std::log(2.0), 1e-15);
    EXPECT_NEAR(psi_gap(1.0), 0.306853, 1e-6);
    EXPECT_NEAR(psi_gap(3.0), 2.306853, 1e-6);
    EXPECT_EQ(psi_gap(-3.0), -psi_gap(3.0));
}

TEST(Gap, PowerEnvelope) {
    for (double p : {0.0, 0.5, 1.0, 1.5, 2.0}) {
        for (double z : grid(0.0, 20.0, 20001)) {
            const double envelope = std::pow(z, p + 1.0) / (p + 1.0);
            EXPECT_LE(psi_gap(z), envelope + 1e-15) << "p=" << p << " z=" << z;
        }
    }
}

TEST(Chi, ConstantsClosedForm) {
    const auto& k = influence_constants();
    const double s2 = std::sqrt(2.0);
    EXPECT_NEAR(k.x1, 1.0 - std::sqrt(4 * s2 - 5), 1e-15);
    EXPECT_NEAR(k.y1, -std::log(2 * (s2 - 1)), 1e-15);
    EXPECT_NEAR(k.p1, std::sqrt(4 * s2 - 5) / (2 * (s2 - 1)), 1e-15);
    EXPECT_NEAR(k.chi_sup, k.y1 + 2 * k.p1 * k.p1, 1e-15);
    EXPECT_NEAR(k.chi_sup, (1 + 2 * s2) / 2 - std::log(2 * (s2 - 1)), 1e-14);
    // The junction sits where psi has slope p1.
    EXPECT_NEAR(psi(k.x1), k.y1, 1e-14);
    EXPECT_NEAR(psi_prime(k.x1), k.p1, 1e-14);
}

TEST(Chi, ReferenceValues) {
    const auto& k = influence_constants();
    EXPECT_EQ(chi(0.0), 0.0);
    EXPECT_NEAR(chi(k.x1), k.y1, 1e-14);
    EXPECT_NEAR(chi(k.x1 + 4 * k.p1 + 1), k.y1 + 2 * k.p1 * k.p1, 1e-15);
    EXPECT_EQ(chi(-3.0), psi(-3.0));
}

TEST(Chi, MajorantChain) {
    for (double x : grid(-10.0, 10.0, 20001)) {
        EXPECT_LE(psi(x), chi(x) + 1e-15) << x;
        EXPECT_LE(chi(x), std::log(1.0 + x + 0.5 * x * x) + 1e-15) << x;
    }
}

TEST(Constants, ConcentrationConstant) {
    const double s2 = std::sqrt(2.0);
    const double closed = 15.0 / (8.0 * std::log(2.0) * (s2 - 1.0)) * std::exp((1.0 + 2.0 * s2) / 2.0);
    EXPECT_NEAR(influence_constants().c, closed, 1e-12 * closed);
    EXPECT_LE(influence_constants().c, 44.3);
}

TEST(Constants, DimensionCoefficient) {
    const double c = influence_constants().c;
    EXPECT_NEAR(dimension_coefficient(), (2 + 3 * c) / (4 * (2 + c)), 1e-15);
    EXPECT_LE(dimension_coefficient(), kDimensionCoefficient);
}

#include "gramlab/influence.hpp"

#include <cmath>
#include <numbers>

namespace gramlab {

namespace {

InfluenceConstants compute_constants() {
    const double s2 = std::numbers::sqrt2;
    const double root = std::sqrt(4.0 * s2 - 5.0);
    InfluenceConstants k{};
    k.c = 15.0 / (8.0 * std::numbers::ln2 * (s2 - 1.0)) * std::exp((1.0 + 2.0 * s2) / 2.0);
    k.x1 = 1.0 - root;
    k.y1 = -std::log(2.0 * (s2 - 1.0));
    k.p1 = root / (2.0 * (s2 - 1.0));
    k.chi_sup = k.y1 + 2.0 * k.p1 * k.p1;
    return k;
}

void check_finite(double x) {
    if (!std::isfinite(x)) throw InvalidInput("influence kernel evaluated at a non-finite point");
}

double psi_positive(double x) {
    if (x >= 1.0) return std::numbers::ln2;
    return -std::log(1.0 - x + 0.5 * x * x);
}

}  // namespace

const InfluenceConstants& influence_constants() {
    static const InfluenceConstants k = compute_constants();
    return k;
}

double dimension_coefficient() {
    const double c = influence_constants().c;
    const double value = (2.0 + 3.0 * c) / (4.0 * (2.0 + c));
    if (value > kDimensionCoefficient) throw NumericalFailure("dimension coefficient exceeds its published bound");
    return value;
}

double psi(double x) {
    check_finite(x);
    return x >= 0.0 ? psi_positive(x) : -psi_positive(-x);
}

double psi_prime(double x) {
    check_finite(x);
    const double z = std::abs(x);
    if (z >= 1.0) return 0.0;
    return (1.0 - z) / (1.0 - z + 0.5 * z * z);
}

double psi_gap(double z) { return z - psi(z); }

double chi(double x) {
    check_finite(x);
    const auto& k = influence_constants();
    if (x <= k.x1) return psi(x);
    const double t = x - k.x1;
    if (t <= 4.0 * k.p1) return k.y1 + k.p1 * t - t * t / 8.0;
    return k.chi_sup;
}

}  // namespace gramlab

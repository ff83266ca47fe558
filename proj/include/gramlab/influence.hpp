#pragma once

#include "gramlab/types.hpp"

#include <cmath>
#include <numbers>

namespace gramlab {

struct InfluenceConstants {
    double c;        // concentration constant multiplying the PAC-Bayes entropy term
    double x1;       // junction of chi with psi
    double y1;       // psi(x1)
    double p1;       // psi'(x1)
    double chi_sup;  // y1 + 2 p1^2
};

const InfluenceConstants& influence_constants();

// Coefficient of d inside the log-confidence term used by every bound.
// The exact value (2+3c)/(4(2+c)) is rounded up to this published figure.
inline constexpr double kDimensionCoefficient = 0.73;

// (2+3c)/(4(2+c)); never exceeds kDimensionCoefficient.
double dimension_coefficient();

// Bounded odd non-decreasing truncation: log 2 beyond 1, -log(1-x+x^2/2) on [0,1].
double psi(double x);

// Even; zero for |x| >= 1.
double psi_prime(double x);

// z - psi(z).
double psi_gap(double z);

struct PsiWithSlope {
    double value;
    double slope;
};

// psi and psi' together; x must be finite.
inline PsiWithSlope psi_with_slope(double x) {
    constexpr double kLog2 = std::numbers::ln2;
    const double z = x < 0.0 ? -x : x;
    if (z >= 1.0) return {x < 0.0 ? -kLog2 : kLog2, 0.0};
    const double q = 1.0 - z + 0.5 * z * z;
    const double v = -std::log(q);
    return {x < 0.0 ? -v : v, (1.0 - z) / q};
}

// Concave majorant of psi on the positive axis, equal to psi below x1.
double chi(double x);

}  // namespace gramlab

#pragma once

#include "gramlab/types.hpp"

#include <cstdint>
#include <optional>

namespace gramlab {

struct BoundsInput {
    double kappa;     // directional kurtosis, > 1
    int d;            // dimension, >= 1
    std::int64_t n;   // sample size, >= 1
    double eps;       // confidence parameter in (0, 1/2)
};

struct BoundsReport {
    double lambda = 0.0;
    double mu = 0.0;
    double delta_hat = 0.0;  // +inf when mu >= 1/2
    double gamma_minus = 0.0;
    double n_min = 0.0;
    bool feasible = false;

    bool delta_hat_infinite() const;
};

// log(1/eps) + 0.73 d.
double log_confidence_term(double eps, int d);

BoundsReport core_bounds(const BoundsInput& in);

// Same shapes with kappa -> (sqrt(kappa)+1)^2 and d -> d+1.
BoundsReport covariance_bounds(const BoundsInput& in);

// Same shapes with kappa -> (sqrt(k1)+sqrt(k2))^2 and d -> d+1. A combined
// kurtosis <= 1 yields an infeasible report with infinite entries.
BoundsReport regression_bounds(double kappa1, double kappa2, int d, std::int64_t n, double eps);

// gamma_minus * R^4 * (1 + delta_hat)^2.
double gamma_plus(const BoundsReport& report, double radius);

struct MomentInputs {
    // Exponential-moment hypothesis on ||G^{-1/2}X||^{2 exp_p}.
    std::optional<double> exp_p;       // in (0, 1]
    std::optional<double> exp_rate;    // alpha > 0
    std::optional<double> exp_offset;  // eta >= 0
    std::optional<double> moment_exp;  // E||G^{-1/2}X||^{2 exp_p}; d^exp_p when absent

    // Polynomial-moment hypotheses.
    double p = 2.0;  // in (0, 2]
    double q = 2.0;  // in [1, 2]
    std::optional<double> moment_2p2;   // E||G^{-1/2}X||^{2p+2}
    std::optional<double> moment_4p4;   // E||G^{-1/2}X||^{4p+4}
    std::optional<double> moment_2qp1;  // E||G^{-1/2}X||^{2q(p+1)}
};

struct GammaPlusVariants {
    std::optional<double> exponential;    // exponential-moment variant
    std::optional<double> chebyshev;      // fourth-order moment variant, p in (1, 2]
    std::optional<double> truncated_mean; // C_q variant, p in [1, 2]
};

double gamma_plus_exponential(const BoundsInput& in, const MomentInputs& m, double delta_hat);
double gamma_plus_chebyshev(const BoundsInput& in, const MomentInputs& m, double delta_hat);
double gamma_plus_truncated_mean(const BoundsInput& in, const MomentInputs& m, double delta_hat);

// Every variant whose moments are present.
GammaPlusVariants gamma_plus_variants(const BoundsInput& in, const MomentInputs& m, double delta_hat);

// E||G^{-1/2}X||^{2k} = d(d+2)...(d+2k-2) for a Gaussian design.
double gaussian_norm_moment(int d, int k);

double cq_constant(double q);

// E(W) + C_q E(W^q)^{1/q} / (eps^{1/q} n^{1-1/q}).
double truncated_mean_bound(double ew, double ewq, double q, std::int64_t n, double eps);

// E(W^q) >= E(W)^q.
bool moments_jensen_consistent(double ew, double ewq, double q);

double kurtosis_shift(double kappa);
double kurtosis_split(double kappa1, double kappa2);

// delta^2 / (1-delta)^2.
double excess_risk_factor(double delta);

// mean_i (y_i - <theta*, x_i>)^2 ||G^{-1/2} x_i||^2.
double exact_rate_constant(const LabeledSample& sample, const Vector& theta_star, const Matrix& gram);

}  // namespace gramlab

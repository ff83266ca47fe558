#pragma once

#include "gramlab/types.hpp"

namespace gramlab {

struct SolverConfig {
    double rel_tol = 1e-10;  // bracket width relative to its upper end, on u = 1/rho
    int max_iter = 200;
};

inline constexpr double kDefaultConfidence = 0.05;

struct DirectionalEstimate {
    double value = 0.0;  // rho = 1/u*
    bool alpha_infinite = false;
    int iterations = 0;
    double residual = 0.0;  // |r_lambda(u*)|
    double u = 0.0;
    double lambda = 0.0;
    // Initial and final brackets with r(lo) <= 0 < r(hi).
    double initial_lo = 0.0;
    double initial_hi = 0.0;
    double lo = 0.0;
    double hi = 0.0;
    bool bracket_extended = false;
    int evaluations = 0;
};

class SolverFailure : public NumericalFailure {
public:
    SolverFailure(const std::string& what, double lo, double hi);
    double lo;
    double hi;
};

// (1/(n lambda)) sum psi(lambda (u p_i^2 - 1)).
double r_lambda(const Vector& p, double lambda, double u);

// Limit of r_lambda as u grows without bound.
double r_lambda_limit(const Vector& p, double lambda);

DirectionalEstimate solve_S(const Vector& p, double lambda, const SolverConfig& cfg = {});

// Scale lambda(p) tuned to the empirical mean and variance of p^2.
double adaptive_lambda(const Vector& p, double eps = kDefaultConfidence);

// solve_S at the adaptive scale.
DirectionalEstimate robust_energy(const Vector& p, double eps = kDefaultConfidence, const SolverConfig& cfg = {});

DirectionalEstimate estimate_direction(const Sample& sample, const Vector& theta, double eps = kDefaultConfidence,
                                       const SolverConfig& cfg = {});

DirectionalEstimate estimate_direction_fixed(const Sample& sample, const Vector& theta, double lambda,
                                             const SolverConfig& cfg = {});

}  // namespace gramlab

#pragma once

#include "gramlab/gram.hpp"
#include "gramlab/types.hpp"

#include <optional>

namespace gramlab {

enum class CovarianceMethod { empirical, robust };

std::string to_string(CovarianceMethod m);

struct CovarianceEstimate {
    Matrix matrix;
    CovarianceMethod method = CovarianceMethod::empirical;
    Vector mean_proxy;    // minimizing shift per canonical direction; diagnostic only
    Matrix extended;      // (d+1)x(d+1) estimate on rows (x - s, -1); robust only
    Vector shift;         // the pre-centering s; robust only
    double schur_c = 0.0;  // bottom-right entry of the extended estimate
};

// (1/n) sum (x_i - mean)(x_i - mean)'.
CovarianceEstimate empirical_covariance(const Sample& sample);

// (1/(2n^2)) sum_ij (x_i - x_j)(x_i - x_j)'; quadratic in n, for cross-checks.
Matrix empirical_covariance_pairwise(const Sample& sample);

// A - b b'/c for g_ext = [[A, b], [b', c]]; requires c > 0.
Matrix schur_reduce(const Matrix& g_ext);

struct CovarianceDirectionOptions {
    double eps = kDefaultConfidence;
    std::optional<double> kappa;   // scale from the covariance bounds
    std::optional<double> lambda;  // explicit scale; overrides kappa
    SolverConfig solver;
    int grid = 128;
};

struct CovarianceDirection {
    double value = 0.0;
    double xi = 0.0;  // minimizing shift
    double lambda = 0.0;
};

// inf over xi of the robust energy of the shifted projections <theta, x_i> - xi,
// at one scale held fixed across xi.
CovarianceDirection robust_covariance_direction(const Sample& sample, const Vector& theta,
                                                const CovarianceDirectionOptions& opt = {});

struct CovarianceOptions {
    double eps = kDefaultConfidence;
    GramMethod backend = GramMethod::robust_iter;
    int iters = 5;
    SolverConfig solver;
    // Net backend only.
    std::optional<double> delta;
    std::optional<double> kappa;
    double net_rho = 0.2;
    NetBuildOptions net;
};

// Extended-Gram estimate on rows (x_i - s, -1) with s the coordinate-wise
// median, followed by the Schur reduction.
CovarianceEstimate robust_covariance(const Sample& sample, const CovarianceOptions& opt = {});

}  // namespace gramlab

#pragma once

#include "gramlab/gram.hpp"
#include "gramlab/types.hpp"

#include <optional>
#include <string>

namespace gramlab {

enum class RegressionMethod { ols, robust };

std::string to_string(RegressionMethod m);

// Extended Gram matrices are second moments of (x, -y):
// G_ext = [[A, g], [g', c]] with A = E xx', g = -E xy, c = E y^2,
// so that R(theta) = (theta; 1)' G_ext (theta; 1).
struct RegressionFit {
    Vector theta;
    RegressionMethod method = RegressionMethod::ols;
    GramMethod backend = GramMethod::empirical;
    Matrix extended_gram;
    int rank_used = 0;
};

// theta = -A^+ g.
RegressionFit fit_from_extended(const Matrix& g_ext, RegressionMethod method, GramMethod backend);

RegressionFit ols(const LabeledSample& sample);

struct RobustLsOptions {
    double eps = kDefaultConfidence;
    GramMethod backend = GramMethod::robust_iter;
    int iters = 5;
    SolverConfig solver;
    // Net backend only: delta directly, or from the kurtosis pair.
    std::optional<double> delta;
    std::optional<double> kappa1;
    std::optional<double> kappa2;
    double net_rho = 0.2;
    NetBuildOptions net;
};

RegressionFit robust_ls(const LabeledSample& sample, const RobustLsOptions& opt = {});

double risk(const Vector& theta, const Matrix& g_ext);
Vector risk_minimizer(const Matrix& g_ext);
// (theta - theta*)' A (theta - theta*), never negative.
double excess_risk(const Vector& theta, const Matrix& g_ext);
double empirical_risk(const Vector& theta, const LabeledSample& sample);

struct ExcessRiskCertificate {
    double excess_bound = 0.0;
    double confidence_region_radius = 0.0;
    bool infinite = false;
};

// Bounds delta^2/((1-delta)(1-delta^2)) N and delta^2/(1-delta)^2 N for a
// quadratic estimate with relative accuracy delta, N being its value at (theta_hat, 1).
ExcessRiskCertificate excess_risk_certificate(double energy_at_fit, double delta);
ExcessRiskCertificate excess_risk_certificate(const RegressionFit& fit, double delta);

}  // namespace gramlab

#include "gramlab/regression.hpp"

#include "gramlab/bounds.hpp"
#include "gramlab/linalg.hpp"

#include <cmath>
#include <limits>

namespace gramlab {

std::string to_string(RegressionMethod m) { return m == RegressionMethod::ols ? "ols" : "robust"; }

namespace {

void check_extended(const Matrix& g_ext) {
    require(g_ext.rows() == g_ext.cols() && g_ext.rows() >= 2, "extended Gram must be square of size >= 2");
    require_finite(g_ext, "extended Gram");
}

void check_theta(const Vector& theta, const Matrix& g_ext) {
    require(theta.size() + 1 == g_ext.rows(), "parameter dimension does not match the extended Gram");
    require_finite(theta, "parameter");
}

}  // namespace

RegressionFit fit_from_extended(const Matrix& g_ext, RegressionMethod method, GramMethod backend) {
    check_extended(g_ext);
    const Eigen::Index d = g_ext.rows() - 1;
    const Matrix a = symmetrize(g_ext.topLeftCorner(d, d));
    RegressionFit fit;
    fit.theta = -pseudo_inverse(a) * g_ext.topRightCorner(d, 1);
    fit.method = method;
    fit.backend = backend;
    fit.extended_gram = g_ext;
    fit.rank_used = numerical_rank(a);
    return fit;
}

RegressionFit ols(const LabeledSample& sample) {
    validate(sample);
    return fit_from_extended(empirical_gram(sample.extended()).matrix, RegressionMethod::ols, GramMethod::empirical);
}

RegressionFit robust_ls(const LabeledSample& sample, const RobustLsOptions& opt) {
    validate(sample);
    const Sample ext = sample.extended();
    Matrix g;
    switch (opt.backend) {
        case GramMethod::empirical:
            g = empirical_gram(ext).matrix;
            break;
        case GramMethod::robust_iter: {
            IterativeOptions it;
            it.iters = opt.iters;
            it.eps = opt.eps;
            it.solver = opt.solver;
            g = robust_gram_iterative(ext, it).matrix;
            break;
        }
        case GramMethod::robust_net: {
            NetOptions no;
            no.eps = opt.eps;
            no.solver = opt.solver;
            if (opt.delta) {
                no.delta = opt.delta;
            } else if (opt.kappa1 && opt.kappa2) {
                const BoundsReport rep = regression_bounds(*opt.kappa1, *opt.kappa2, static_cast<int>(sample.d()),
                                                           static_cast<std::int64_t>(sample.n()), opt.eps);
                require(rep.feasible && !rep.delta_hat_infinite(), "certified deviation is infinite for these kurtoses");
                no.delta = rep.delta_hat;
            } else {
                throw InvalidInput("net backend needs delta or both kurtoses");
            }
            g = robust_gram_net(ext, no, build_sphere_net(ext, opt.net_rho, opt.net)).matrix;
            break;
        }
    }
    return fit_from_extended(g, RegressionMethod::robust, opt.backend);
}

double risk(const Vector& theta, const Matrix& g_ext) {
    check_extended(g_ext);
    check_theta(theta, g_ext);
    Vector v(theta.size() + 1);
    v << theta, 1.0;
    return v.dot(g_ext * v);
}

Vector risk_minimizer(const Matrix& g_ext) {
    return fit_from_extended(g_ext, RegressionMethod::ols, GramMethod::empirical).theta;
}

double excess_risk(const Vector& theta, const Matrix& g_ext) {
    check_extended(g_ext);
    check_theta(theta, g_ext);
    const Eigen::Index d = theta.size();
    const Vector diff = theta - risk_minimizer(g_ext);
    return std::max(0.0, diff.dot(g_ext.topLeftCorner(d, d) * diff));
}

double empirical_risk(const Vector& theta, const LabeledSample& sample) {
    validate(sample);
    require(static_cast<std::size_t>(theta.size()) == sample.d(), "parameter dimension does not match the sample");
    return (sample.y - sample.x * theta).squaredNorm() / static_cast<double>(sample.n());
}

ExcessRiskCertificate excess_risk_certificate(double energy_at_fit, double delta) {
    require(std::isfinite(energy_at_fit) && energy_at_fit >= 0.0, "energy must be finite and non-negative");
    require(delta >= 0.0 && !std::isnan(delta), "delta must be non-negative");
    ExcessRiskCertificate cert;
    if (delta >= 1.0) {
        cert.infinite = true;
        cert.excess_bound = cert.confidence_region_radius = std::numeric_limits<double>::infinity();
        return cert;
    }
    const double d2 = delta * delta;
    cert.excess_bound = d2 / ((1.0 - delta) * (1.0 - d2)) * energy_at_fit;
    cert.confidence_region_radius = d2 / ((1.0 - delta) * (1.0 - delta)) * energy_at_fit;
    return cert;
}

ExcessRiskCertificate excess_risk_certificate(const RegressionFit& fit, double delta) {
    return excess_risk_certificate(std::max(0.0, risk(fit.theta, fit.extended_gram)), delta);
}

}  // namespace gramlab

#include "gramlab/bounds.hpp"

#include "gramlab/influence.hpp"
#include "gramlab/linalg.hpp"

#include <cmath>
#include <iostream>
#include <limits>

namespace gramlab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kEndpointTolerance = 1e-9;

void check_input(const BoundsInput& in) {
    require(std::isfinite(in.kappa) && in.kappa > 1.0, "kappa must exceed 1");
    require(in.d >= 1, "dimension must be at least 1");
    require(in.n >= 1, "sample size must be at least 1");
    require(in.eps > 0.0 && in.eps < 0.5, "eps must lie in (0, 1/2)");
}

BoundsReport shaped_bounds(double kappa, int d, std::int64_t n, double eps) {
    const double nn = static_cast<double>(n);
    const double km1 = kappa - 1.0;
    const double l = log_confidence_term(eps, d);
    BoundsReport r;
    r.lambda = std::sqrt(2.0 * l / (km1 * nn));
    r.mu = std::sqrt(2.0 * km1 * l / nn) + 6.81 * std::sqrt(2.0 * kappa * d / nn);
    r.delta_hat = r.mu < 0.5 ? r.mu / (1.0 - 2.0 * r.mu) : kInf;
    r.gamma_minus = 2.0 * l / (3.0 * km1 * nn);
    const double root = 20.0 * std::sqrt(kappa * d) + (2.5 + 1.0 / (2.0 * km1)) * std::sqrt(2.0 * km1 * l);
    r.n_min = root * root;
    r.feasible = nn > r.n_min && r.mu < 0.5;
    return r;
}

BoundsReport infeasible_report() {
    BoundsReport r;
    r.lambda = r.mu = r.delta_hat = r.gamma_minus = r.n_min = kInf;
    r.feasible = false;
    return r;
}

void check_delta(double delta_hat) {
    require(delta_hat >= 0.0 && std::isfinite(delta_hat), "delta_hat must be finite and non-negative");
}

// (1/(p+1)) (2L/((kappa-1)n))^{p/2} (1+delta_hat)^{p+1}.
double polynomial_prefactor(const BoundsInput& in, double p, double delta_hat) {
    const double base = 2.0 * log_confidence_term(in.eps, in.d) / ((in.kappa - 1.0) * static_cast<double>(in.n));
    return std::pow(base, p / 2.0) * std::pow(1.0 + delta_hat, p + 1.0) / (p + 1.0);
}

double need(const std::optional<double>& v, const char* name) {
    if (!v) throw InvalidInput(std::string("missing moment input: ") + name);
    require(std::isfinite(*v) && *v >= 0.0, std::string(name) + " must be finite and non-negative");
    return *v;
}

}  // namespace

bool BoundsReport::delta_hat_infinite() const { return std::isinf(delta_hat); }

double log_confidence_term(double eps, int d) {
    // Evaluated once to assert the rounded coefficient dominates its exact form.
    static const double exact = dimension_coefficient();
    (void)exact;
    return std::log(1.0 / eps) + kDimensionCoefficient * d;
}

BoundsReport core_bounds(const BoundsInput& in) {
    check_input(in);
    return shaped_bounds(in.kappa, in.d, in.n, in.eps);
}

BoundsReport covariance_bounds(const BoundsInput& in) {
    require(std::isfinite(in.kappa) && in.kappa >= 1.0, "kappa must be at least 1");
    BoundsInput shifted = in;
    shifted.kappa = kurtosis_shift(in.kappa);
    shifted.d = in.d + 1;
    check_input(shifted);
    return shaped_bounds(shifted.kappa, shifted.d, shifted.n, shifted.eps);
}

BoundsReport regression_bounds(double kappa1, double kappa2, int d, std::int64_t n, double eps) {
    const double kappa = kurtosis_split(kappa1, kappa2);
    BoundsInput in{kappa, d + 1, n, eps};
    require(d >= 1 && n >= 1 && eps > 0.0 && eps < 0.5, "invalid regression bounds input");
    if (!(kappa > 1.0)) return infeasible_report();
    return shaped_bounds(in.kappa, in.d, in.n, in.eps);
}

double gamma_plus(const BoundsReport& report, double radius) {
    require(radius >= 0.0, "radius must be non-negative");
    const double r2 = radius * radius;
    return report.gamma_minus * r2 * r2 * (1.0 + report.delta_hat) * (1.0 + report.delta_hat);
}

double gamma_plus_exponential(const BoundsInput& in, const MomentInputs& m, double delta_hat) {
    check_input(in);
    check_delta(delta_hat);
    const double p = need(m.exp_p, "exp_p");
    require(p > 0.0 && p <= 1.0, "exponential-moment exponent must lie in (0, 1]");
    const double alpha = need(m.exp_rate, "exp_rate");
    require(alpha > 0.0, "exponential-moment rate must be positive");
    const double eta = need(m.exp_offset, "exp_offset");
    const double moment = m.moment_exp ? need(m.moment_exp, "moment_exp") : std::pow(in.d, p);
    const double nn = static_cast<double>(in.n);
    const double radius = moment + 2.0 / alpha * std::log(nn / in.eps) + eta;
    return 2.0 * log_confidence_term(in.eps, in.d) * std::pow(radius, 2.0 / p) * (1.0 + delta_hat) *
           (1.0 + delta_hat) / (3.0 * (in.kappa - 1.0) * nn);
}

double gamma_plus_chebyshev(const BoundsInput& in, const MomentInputs& m, double delta_hat) {
    check_input(in);
    check_delta(delta_hat);
    require(m.p > 1.0 && m.p <= 2.0, "fourth-order variant requires p in (1, 2]");
    const double m2 = need(m.moment_2p2, "moment_2p2");
    const double m4 = need(m.moment_4p4, "moment_4p4");
    const double nn = static_cast<double>(in.n);
    return polynomial_prefactor(in, m.p, delta_hat) * (m2 + std::sqrt(m4 / (nn * in.eps)));
}

double gamma_plus_truncated_mean(const BoundsInput& in, const MomentInputs& m, double delta_hat) {
    check_input(in);
    check_delta(delta_hat);
    require(m.p >= 1.0 && m.p <= 2.0, "truncated-mean variant requires p in [1, 2]");
    const double m2 = need(m.moment_2p2, "moment_2p2");
    const double mq = need(m.moment_2qp1, "moment_2qp1");
    const double q = m.q;
    const double nn = static_cast<double>(in.n);
    const double tail = cq_constant(q) * std::pow(mq, 1.0 / q) / (std::pow(in.eps, 1.0 / q) * std::pow(nn, 1.0 - 1.0 / q));
    return polynomial_prefactor(in, m.p, delta_hat) * (m2 + tail);
}

GammaPlusVariants gamma_plus_variants(const BoundsInput& in, const MomentInputs& m, double delta_hat) {
    GammaPlusVariants v;
    if (m.exp_p && m.exp_rate && m.exp_offset) v.exponential = gamma_plus_exponential(in, m, delta_hat);
    if (m.moment_2p2 && m.moment_4p4 && m.p > 1.0) v.chebyshev = gamma_plus_chebyshev(in, m, delta_hat);
    if (m.moment_2p2 && m.moment_2qp1 && m.p >= 1.0) v.truncated_mean = gamma_plus_truncated_mean(in, m, delta_hat);
    return v;
}

double gaussian_norm_moment(int d, int k) {
    require(d >= 1 && k >= 0, "invalid Gaussian moment order");
    double m = 1.0;
    for (int j = 0; j < k; ++j) m *= d + 2.0 * j;
    return m;
}

double cq_constant(double q) {
    require(q >= 1.0 && q <= 2.0, "q must lie in [1, 2]");
    if (q - 1.0 < kEndpointTolerance || 2.0 - q < kEndpointTolerance) return 1.0;
    return std::pow(q, q - 1.0) /
           (2.0 * std::pow(q - 1.0, q - 1.0) * std::pow(1.0 - q / 2.0, (2.0 - q) / q));
}

double truncated_mean_bound(double ew, double ewq, double q, std::int64_t n, double eps) {
    require(ew >= 0.0 && ewq >= 0.0, "moments must be non-negative");
    require(n >= 1 && eps > 0.0 && eps < 1.0, "invalid sample size or confidence");
    const double cq = cq_constant(q);
    if (!moments_jensen_consistent(ew, ewq, q)) {
        std::clog << "warning: E(W^q) < E(W)^q violates Jensen's inequality\n";
    }
    const double nn = static_cast<double>(n);
    return ew + cq * std::pow(ewq, 1.0 / q) / (std::pow(eps, 1.0 / q) * std::pow(nn, 1.0 - 1.0 / q));
}

bool moments_jensen_consistent(double ew, double ewq, double q) {
    return ewq >= std::pow(ew, q) * (1.0 - 1e-12);
}

double kurtosis_shift(double kappa) {
    require(kappa >= 1.0, "kappa must be at least 1");
    const double s = std::sqrt(kappa) + 1.0;
    return s * s;
}

double kurtosis_split(double kappa1, double kappa2) {
    require(kappa1 >= 0.0 && kappa2 >= 0.0, "kurtosis coefficients must be non-negative");
    const double s = std::sqrt(kappa1) + std::sqrt(kappa2);
    return s * s;
}

double excess_risk_factor(double delta) {
    require(delta >= 0.0, "delta must be non-negative");
    if (delta >= 1.0) return kInf;
    return delta * delta / ((1.0 - delta) * (1.0 - delta));
}

double exact_rate_constant(const LabeledSample& sample, const Vector& theta_star, const Matrix& gram) {
    validate(sample);
    require(theta_star.size() == static_cast<Eigen::Index>(sample.d()), "theta dimension mismatch");
    require(gram.rows() == gram.cols() && gram.rows() == theta_star.size(), "Gram dimension mismatch");
    const Matrix whiten = pseudo_inverse(gram);
    const Vector resid = sample.y - sample.x * theta_star;
    const Vector norms = (sample.x * whiten).cwiseProduct(sample.x).rowwise().sum();
    return resid.cwiseAbs2().cwiseProduct(norms).mean();
}

}  // namespace gramlab

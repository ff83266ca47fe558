#include "gramlab/direction_solver.hpp"

#include "gramlab/influence.hpp"

#include <cmath>
#include <limits>
#include <numbers>

namespace gramlab {

namespace {

constexpr double kSlopeGuard = 1e-300;
constexpr int kMaxDoublings = 60;

struct Point {
    double u;
    double r;
    double slope;  // dr/du
};

class Criterion {
public:
    Criterion(const Vector& p, double lambda) : sq_(p.array().square()), lambda_(lambda) {}

    Point at(double u) {
        ++evaluations;
        const Eigen::Index n = sq_.size();
        double sum = 0.0;
        double slope = 0.0;
        for (Eigen::Index i = 0; i < n; ++i) {
            const auto v = psi_with_slope(lambda_ * (u * sq_[i] - 1.0));
            sum += v.value;
            slope += sq_[i] * v.slope;
        }
        const double nn = static_cast<double>(n);
        return {u, sum / (nn * lambda_), slope / nn};
    }

    Point origin() const {
        const double m = sq_.mean();
        return {0.0, -psi(lambda_) / lambda_, m * psi_prime(lambda_)};
    }

    int evaluations = 0;

private:
    Vector sq_;
    double lambda_;
};

void check_projections(const Vector& p) {
    require(p.size() >= 1, "projections must be non-empty");
    require_finite(p, "projections");
}

void check_lambda(double lambda) {
    require(std::isfinite(lambda) && lambda > 0.0, "lambda must be positive and finite");
}

void check_config(const SolverConfig& cfg) {
    require(cfg.rel_tol > 0.0 && std::isfinite(cfg.rel_tol), "rel_tol must be positive");
    require(cfg.max_iter >= 1, "max_iter must be at least 1");
}

class Bracket {
public:
    Point lo{0.0, 0.0, 0.0};
    Point hi{std::numeric_limits<double>::infinity(), 0.0, 0.0};
    bool has_hi = false;

    // Returns true when pt became an endpoint.
    bool absorb(const Point& pt) {
        if (pt.r <= 0.0) {
            if (pt.u > lo.u) {
                lo = pt;
                return true;
            }
        } else if (!has_hi || pt.u < hi.u) {
            hi = pt;
            has_hi = true;
            return true;
        }
        return false;
    }

    double width() const { return hi.u - lo.u; }
    bool inside(double u) const { return std::isfinite(u) && u > lo.u && u < hi.u; }
};

// Newton step u - r/r'; NaN when the slope guard trips.
double newton(const Point& pt) {
    if (!(pt.slope > kSlopeGuard)) return std::numeric_limits<double>::quiet_NaN();
    return pt.u - pt.r / pt.slope;
}

// Newton candidate from one endpoint, followed by a probe one step further
// when the candidate stays on the same side of the root. The probe lets the
// opposite endpoint catch up at the Newton rate.
void newton_with_probe(Criterion& crit, Bracket& br, bool from_lo) {
    const Point& origin = from_lo ? br.lo : br.hi;
    const double c = newton(origin);
    if (!br.inside(c)) return;
    const double start = origin.u;
    const Point pc = crit.at(c);
    const bool same_side = from_lo ? (pc.r <= 0.0) : (pc.r > 0.0);
    br.absorb(pc);
    if (!same_side) return;
    const double step = std::abs(c - start);
    const double probe = from_lo ? c + step : c - step;
    if (br.inside(probe)) br.absorb(crit.at(probe));
}

}  // namespace

SolverFailure::SolverFailure(const std::string& what, double lo_, double hi_)
    : NumericalFailure(what), lo(lo_), hi(hi_) {}

double r_lambda(const Vector& p, double lambda, double u) {
    check_projections(p);
    check_lambda(lambda);
    require(u >= 0.0 && std::isfinite(u), "u must be finite and non-negative");
    Criterion crit(p, lambda);
    return crit.at(u).r;
}

double r_lambda_limit(const Vector& p, double lambda) {
    check_projections(p);
    check_lambda(lambda);
    const Eigen::Index nonzero = (p.array() != 0.0).count();
    const Eigen::Index zero = p.size() - nonzero;
    return (static_cast<double>(nonzero) * std::numbers::ln2 - static_cast<double>(zero) * psi(lambda)) /
           (static_cast<double>(p.size()) * lambda);
}

DirectionalEstimate solve_S(const Vector& p, double lambda, const SolverConfig& cfg) {
    check_projections(p);
    check_lambda(lambda);
    check_config(cfg);

    DirectionalEstimate est;
    est.lambda = lambda;
    const double limit = r_lambda_limit(p, lambda);
    const Vector sq = p.array().square();
    double min_nonzero = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < sq.size(); ++i) {
        if (sq[i] > 0.0) min_nonzero = std::min(min_nonzero, sq[i]);
    }
    if (!std::isfinite(min_nonzero) || limit <= 0.0) {
        est.alpha_infinite = true;
        est.value = 0.0;
        est.residual = std::abs(limit);
        est.u = std::numeric_limits<double>::infinity();
        est.lo = est.initial_lo = 0.0;
        est.hi = est.initial_hi = std::numeric_limits<double>::infinity();
        return est;
    }

    Criterion crit(p, lambda);
    Bracket br;
    br.lo = crit.origin();
    br.absorb(crit.at(1.0 / sq.mean()));
    const double saturating = (1.0 + 1.0 / lambda) / min_nonzero;
    if (std::isfinite(saturating)) br.absorb(crit.at(saturating));
    if (!br.has_hi) {
        double u = std::max(br.lo.u, 1.0 / sq.mean());
        for (int k = 0; k < kMaxDoublings && !br.has_hi; ++k) {
            u *= 2.0;
            if (!std::isfinite(u)) break;
            br.absorb(crit.at(u));
        }
        est.bracket_extended = true;
        if (!br.has_hi) throw SolverFailure("could not bracket the root", br.lo.u, u);
    }
    est.initial_lo = br.lo.u;
    est.initial_hi = br.hi.u;

    int iter = 0;
    while (br.width() > cfg.rel_tol * br.hi.u) {
        if (iter >= cfg.max_iter) {
            throw SolverFailure("iteration limit reached before the bracket converged", br.lo.u, br.hi.u);
        }
        ++iter;
        const double before = br.width();
        newton_with_probe(crit, br, true);
        newton_with_probe(crit, br, false);
        if (br.width() > 0.5 * before) br.absorb(crit.at(0.5 * (br.lo.u + br.hi.u)));
    }

    const Point& best = (std::abs(br.lo.r) <= std::abs(br.hi.r) && br.lo.u > 0.0) ? br.lo : br.hi;
    est.u = best.u;
    est.value = 1.0 / best.u;
    est.residual = std::abs(best.r);
    est.iterations = iter;
    est.lo = br.lo.u;
    est.hi = br.hi.u;
    est.evaluations = crit.evaluations;
    return est;
}

double adaptive_lambda(const Vector& p, double eps) {
    check_projections(p);
    require(p.size() >= 2, "adaptive scale needs at least two projections");
    require(eps > 0.0 && eps < 1.0, "eps must lie in (0, 1)");
    const double n = static_cast<double>(p.size());
    const double t = (2.0 / n) * std::log(1.0 / eps);
    require(t < 1.0, "sample too small for confidence level");
    const Vector sq = p.array().square();
    const double m = sq.mean();
    if (m == 0.0) return 1.0;
    const double v = (sq.array() - m).square().mean();
    if (v == 0.0) return 1.0 / (2.0 * m);
    return m * std::sqrt(t * (1.0 - t) / v);
}

DirectionalEstimate robust_energy(const Vector& p, double eps, const SolverConfig& cfg) {
    return solve_S(p, adaptive_lambda(p, eps), cfg);
}

namespace {

Vector project(const Sample& sample, const Vector& theta) {
    validate(sample);
    require(theta.size() == sample.x.cols(), "direction dimension does not match the sample");
    require_finite(theta, "direction");
    return sample.x * theta;
}

}  // namespace

DirectionalEstimate estimate_direction(const Sample& sample, const Vector& theta, double eps,
                                       const SolverConfig& cfg) {
    return robust_energy(project(sample, theta), eps, cfg);
}

DirectionalEstimate estimate_direction_fixed(const Sample& sample, const Vector& theta, double lambda,
                                             const SolverConfig& cfg) {
    return solve_S(project(sample, theta), lambda, cfg);
}

}  // namespace gramlab

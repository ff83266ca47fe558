#include "gramlab/covariance.hpp"

#include "gramlab/bounds.hpp"
#include "gramlab/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

namespace gramlab {

std::string to_string(CovarianceMethod m) {
    return m == CovarianceMethod::empirical ? "empirical" : "robust";
}

CovarianceEstimate empirical_covariance(const Sample& sample) {
    validate(sample);
    const Vector mean = sample.x.colwise().mean();
    const Matrix centered = sample.x.rowwise() - mean.transpose();
    CovarianceEstimate c;
    c.matrix = symmetrize(centered.transpose() * centered / static_cast<double>(sample.n()));
    c.method = CovarianceMethod::empirical;
    c.mean_proxy = mean;
    return c;
}

Matrix empirical_covariance_pairwise(const Sample& sample) {
    validate(sample);
    const Eigen::Index n = sample.x.rows();
    const Eigen::Index d = sample.x.cols();
    Matrix acc = Matrix::Zero(d, d);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = i + 1; j < n; ++j) {
            const Vector diff = (sample.x.row(i) - sample.x.row(j)).transpose();
            acc.noalias() += diff * diff.transpose();
        }
    }
    // Each unordered pair appears twice in the double sum.
    return symmetrize(acc / (static_cast<double>(n) * static_cast<double>(n)));
}

Matrix schur_reduce(const Matrix& g_ext) {
    require(g_ext.rows() == g_ext.cols() && g_ext.rows() >= 2, "extended matrix must be square of size >= 2");
    const Eigen::Index d = g_ext.rows() - 1;
    const double c = g_ext(d, d);
    if (!(c > 0.0)) throw NumericalFailure("degenerate extended estimate: corner entry is not positive");
    const Vector b = g_ext.topRightCorner(d, 1);
    return symmetrize(g_ext.topLeftCorner(d, d) - b * b.transpose() / c);
}

namespace {

double median_of(const Vector& v) {
    std::vector<double> w(v.data(), v.data() + v.size());
    const std::size_t mid = w.size() / 2;
    std::nth_element(w.begin(), w.begin() + static_cast<std::ptrdiff_t>(mid), w.end());
    const double upper = w[mid];
    if (w.size() % 2 == 1) return upper;
    const double lower = *std::max_element(w.begin(), w.begin() + static_cast<std::ptrdiff_t>(mid));
    return 0.5 * (lower + upper);
}

Vector coordinate_median(const Matrix& x) {
    Vector s(x.cols());
    for (Eigen::Index j = 0; j < x.cols(); ++j) s(j) = median_of(x.col(j));
    return s;
}

}  // namespace

CovarianceDirection robust_covariance_direction(const Sample& sample, const Vector& theta,
                                                const CovarianceDirectionOptions& opt) {
    validate(sample);
    require(theta.size() == sample.x.cols(), "direction dimension does not match the sample");
    require_finite(theta, "direction");
    require(opt.grid >= 2, "grid must have at least two points");
    const Vector p = sample.x * theta;
    const double med = median_of(p);

    CovarianceDirection out;
    if (opt.lambda) {
        out.lambda = *opt.lambda;
    } else if (opt.kappa) {
        out.lambda = covariance_bounds({*opt.kappa, static_cast<int>(sample.d()),
                                        static_cast<std::int64_t>(sample.n()), opt.eps})
                         .lambda;
    } else {
        out.lambda = adaptive_lambda(p.array() - med, opt.eps);
    }
    require(std::isfinite(out.lambda) && out.lambda > 0.0, "scale must be positive and finite");

    auto energy = [&](double xi) { return solve_S(p.array() - xi, out.lambda, opt.solver).value; };
    double best = std::numeric_limits<double>::infinity();
    auto consider = [&](double xi) {
        const double v = energy(xi);
        if (v < best) {
            best = v;
            out.xi = xi;
        }
        return v;
    };
    consider(p.mean());
    consider(med);
    consider(0.0);

    const double lo = p.minCoeff();
    const double hi = p.maxCoeff();
    const double range = hi - lo;
    if (range > 0.0 && best > 0.0) {
        const double a = lo - range;
        const double step = 3.0 * range / (opt.grid - 1);
        for (int k = 0; k < opt.grid; ++k) consider(a + step * k);
        // Golden-section refinement on the cells adjacent to the best point.
        const double inv_phi = 1.0 / std::numbers::phi;
        double l = out.xi - step;
        double r = out.xi + step;
        double x1 = r - inv_phi * (r - l);
        double x2 = l + inv_phi * (r - l);
        double f1 = consider(x1);
        double f2 = consider(x2);
        while (r - l > 1e-10 * range) {
            if (f1 < f2) {
                r = x2;
                x2 = x1;
                f2 = f1;
                x1 = r - inv_phi * (r - l);
                f1 = consider(x1);
            } else {
                l = x1;
                x1 = x2;
                f1 = f2;
                x2 = l + inv_phi * (r - l);
                f2 = consider(x2);
            }
        }
    }
    out.value = best;
    return out;
}

CovarianceEstimate robust_covariance(const Sample& sample, const CovarianceOptions& opt) {
    validate(sample);
    require(sample.n() >= 2, "robust covariance needs at least two rows");
    const Eigen::Index d = sample.x.cols();
    CovarianceEstimate out;
    out.method = CovarianceMethod::robust;
    out.shift = coordinate_median(sample.x);

    Sample ext{Matrix(sample.x.rows(), d + 1)};
    ext.x.leftCols(d) = sample.x.rowwise() - out.shift.transpose();
    ext.x.col(d).setConstant(-1.0);

    switch (opt.backend) {
        case GramMethod::empirical:
            out.extended = empirical_gram(ext).matrix;
            break;
        case GramMethod::robust_iter: {
            IterativeOptions it;
            it.iters = opt.iters;
            it.eps = opt.eps;
            it.solver = opt.solver;
            out.extended = robust_gram_iterative(ext, it).matrix;
            break;
        }
        case GramMethod::robust_net: {
            NetOptions no;
            no.eps = opt.eps;
            no.solver = opt.solver;
            if (opt.delta) {
                no.delta = opt.delta;
            } else if (opt.kappa) {
                const BoundsReport rep = covariance_bounds(
                    {*opt.kappa, static_cast<int>(d), static_cast<std::int64_t>(sample.n()), opt.eps});
                require(rep.feasible && !rep.delta_hat_infinite(), "certified deviation is infinite for this kurtosis");
                no.delta = rep.delta_hat;
            } else {
                throw InvalidInput("net backend needs delta or kappa");
            }
            const SphereNet net = build_sphere_net(ext, opt.net_rho, opt.net);
            out.extended = robust_gram_net(ext, no, net).matrix;
            break;
        }
    }
    out.schur_c = out.extended(d, d);
    out.matrix = schur_reduce(out.extended);
    out.mean_proxy = out.shift - out.extended.topRightCorner(d, 1) / out.schur_c;
    return out;
}

}  // namespace gramlab

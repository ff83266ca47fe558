#include "gramlab/gram.hpp"

#include "gramlab/bounds.hpp"
#include "gramlab/linalg.hpp"

#include <Eigen/QR>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

namespace gramlab {

std::string to_string(GramMethod m) {
    switch (m) {
        case GramMethod::empirical:
            return "empirical";
        case GramMethod::robust_iter:
            return "robust_iter";
        case GramMethod::robust_net:
            return "robust_net";
    }
    return "unknown";
}

GramMethod parse_gram_method(const std::string& text) {
    std::string name = text;
    std::replace(name.begin(), name.end(), '-', '_');
    if (name == "empirical") return GramMethod::empirical;
    if (name == "robust_iter") return GramMethod::robust_iter;
    if (name == "robust_net") return GramMethod::robust_net;
    throw InvalidInput("unknown gram method: " + text);
}

ProjectionEnergy robust_projection_energy(double eps, const SolverConfig& cfg) {
    return [eps, cfg](const Vector& p) { return robust_energy(p, eps, cfg).value; };
}

ProjectionEnergy mean_square_energy() {
    return [](const Vector& p) { return p.squaredNorm() / static_cast<double>(p.size()); };
}

GramEstimate empirical_gram(const Sample& sample) {
    validate(sample);
    GramEstimate g;
    g.matrix = symmetrize(sample.x.transpose() * sample.x / static_cast<double>(sample.n()));
    g.method = GramMethod::empirical;
    g.rank = numerical_rank(g.matrix);
    return g;
}

Matrix polarize(const std::function<double(const Vector&)>& energy, const Matrix& basis) {
    const Eigen::Index k = basis.cols();
    Matrix m(k, k);
    for (Eigen::Index i = 0; i < k; ++i) {
        m(i, i) = energy(basis.col(i));
        for (Eigen::Index j = 0; j < i; ++j) {
            const Vector plus = basis.col(i) + basis.col(j);
            const Vector minus = basis.col(i) - basis.col(j);
            m(i, j) = m(j, i) = 0.25 * (energy(plus) - energy(minus));
        }
    }
    return m;
}

GramEstimate robust_gram_iterative(const Sample& sample, const IterativeOptions& opt) {
    return robust_gram_iterative(sample, opt, robust_projection_energy(opt.eps, opt.solver));
}

GramEstimate robust_gram_iterative(const Sample& sample, const IterativeOptions& opt,
                                   const ProjectionEnergy& energy) {
    validate(sample);
    require(opt.iters >= 1, "iters must be at least 1");
    Matrix g = empirical_gram(sample).matrix;
    const Eigen::Index d = g.rows();
    for (int it = 0; it < opt.iters; ++it) {
        const SymmetricEigen eig = symmetric_eigen(g);
        const double cutoff = rank_cutoff(eig.values);
        Matrix proj = sample.x * eig.vectors;
        // Eigen-directions at or below the rank cutoff carry no energy.
        std::vector<bool> live(static_cast<std::size_t>(d));
        for (Eigen::Index i = 0; i < d; ++i) {
            live[static_cast<std::size_t>(i)] = eig.values(i) > cutoff;
            if (!live[static_cast<std::size_t>(i)]) proj.col(i).setZero();
        }
        Matrix m = Matrix::Zero(d, d);
        for (Eigen::Index i = 0; i < d; ++i) {
            if (!live[static_cast<std::size_t>(i)]) continue;
            m(i, i) = energy(proj.col(i));
            for (Eigen::Index j = 0; j < i; ++j) {
                if (!live[static_cast<std::size_t>(j)]) continue;
                const Vector plus = proj.col(i) + proj.col(j);
                const Vector minus = proj.col(i) - proj.col(j);
                m(i, j) = m(j, i) = 0.25 * (energy(plus) - energy(minus));
            }
        }
        g = symmetrize(eig.vectors * m * eig.vectors.transpose());
    }
    GramEstimate out;
    out.matrix = g;
    out.method = GramMethod::robust_iter;
    out.iterations_or_net_size = opt.iters;
    if (opt.positive_part) out = positive_part(out);
    out.rank = numerical_rank(out.matrix);
    return out;
}

Matrix sample_span(const Sample& sample) {
    validate(sample);
    const SymmetricEigen eig = symmetric_eigen(empirical_gram(sample).matrix);
    const double cutoff = rank_cutoff(eig.values);
    const Eigen::Index d = eig.values.size();
    Eigen::Index k = 0;
    while (k < d && eig.values(d - 1 - k) > cutoff) ++k;
    Matrix basis(d, k);
    for (Eigen::Index i = 0; i < k; ++i) basis.col(i) = eig.vectors.col(d - 1 - i);
    return basis;
}

namespace {

Vector random_unit(std::mt19937_64& rng, Eigen::Index k) {
    std::normal_distribution<double> z;
    Vector v(k);
    do {
        for (Eigen::Index i = 0; i < k; ++i) v(i) = z(rng);
    } while (v.norm() == 0.0);
    return v.normalized();
}

// Directions as columns in span coordinates.
double coordinate_covering(const Matrix& coords, int probes, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    double worst = 0.0;
    for (int s = 0; s < probes; ++s) {
        const Vector v = random_unit(rng, coords.rows());
        const double best = (coords.transpose() * v).maxCoeff();
        // |a - b|^2 = 2 - 2<a, b> for unit vectors.
        worst = std::max(worst, std::sqrt(std::max(0.0, 2.0 - 2.0 * best)));
    }
    return worst;
}

Matrix fibonacci_sphere(int count) {
    Matrix pts(3, count);
    const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
    for (int i = 0; i < count; ++i) {
        const double z = 1.0 - (2.0 * i + 1.0) / count;
        const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
        const double a = golden * i;
        pts.col(i) << r * std::cos(a), r * std::sin(a), z;
        pts.col(i).normalize();
    }
    return pts;
}

}  // namespace

SphereNet sphere_net_for_basis(const Matrix& basis, double rho, const NetBuildOptions& opt) {
    require(std::isfinite(rho) && rho > 0.0, "rho must be positive");
    require(basis.cols() >= 1, "sample span has dimension 0");
    const Eigen::Index k = basis.cols();
    SphereNet net;
    net.rho = rho;
    net.basis = basis;
    Matrix coords;
    if (k == 1) {
        coords = Matrix(1, 2);
        coords << 1.0, -1.0;
        net.covering_estimate = 0.0;
    } else if (k == 2) {
        const double half = std::asin(std::min(rho, 2.0) / 2.0);
        const int count = std::max(2, static_cast<int>(std::ceil(2.0 * std::numbers::pi / (2.0 * half))));
        coords = Matrix(2, count);
        for (int i = 0; i < count; ++i) {
            const double a = 2.0 * std::numbers::pi * i / count;
            coords.col(i) << std::cos(a), std::sin(a);
        }
        net.covering_estimate = 2.0 * std::sin(std::numbers::pi / (2.0 * count));
    } else if (k == 3) {
        // Grow the Fibonacci lattice until probes certify a covering with margin.
        const double target = 0.8 * rho;
        int count = std::max(4, static_cast<int>(std::ceil(2.0 / (target * target))));
        for (;;) {
            coords = fibonacci_sphere(count);
            net.covering_estimate = coordinate_covering(coords, opt.probes, opt.seed + 1);
            if (net.covering_estimate <= target) break;
            count = static_cast<int>(std::ceil(count * 1.25));
        }
    } else {
        require(opt.random_directions >= 1, "random_directions must be positive");
        std::mt19937_64 rng(opt.seed);
        coords = Matrix(k, opt.random_directions);
        for (int i = 0; i < opt.random_directions; ++i) coords.col(i) = random_unit(rng, k);
        net.covering_estimate = coordinate_covering(coords, opt.probes, opt.seed + 1);
        net.guaranteed = false;
    }
    net.directions.reserve(static_cast<std::size_t>(coords.cols()));
    for (Eigen::Index i = 0; i < coords.cols(); ++i) {
        net.directions.push_back((basis * coords.col(i)).normalized());
    }
    return net;
}

SphereNet build_sphere_net(const Sample& sample, double rho, const NetBuildOptions& opt) {
    require(std::isfinite(rho) && rho > 0.0, "rho must be positive");
    return sphere_net_for_basis(sample_span(sample), rho, opt);
}

double covering_radius_estimate(const SphereNet& net, int probes, std::uint64_t seed) {
    require(!net.directions.empty(), "empty net");
    require(probes >= 1, "probes must be positive");
    const Eigen::Index k = net.basis.cols();
    Matrix coords(k, static_cast<Eigen::Index>(net.directions.size()));
    for (std::size_t i = 0; i < net.directions.size(); ++i) {
        coords.col(static_cast<Eigen::Index>(i)) = net.basis.transpose() * net.directions[i];
    }
    return coordinate_covering(coords, probes, seed);
}

double net_radius_for_precision(double delta, double lambda_min, double energy_trace) {
    require(delta > 0.0 && lambda_min > 0.0 && energy_trace > 0.0,
            "precision rule needs positive delta, smallest eigenvalue and trace");
    return delta * delta * lambda_min / (2.0 * energy_trace);
}

NetQpFailure::NetQpFailure(const std::string& what, double gap_) : NumericalFailure(what), gap(gap_) {}

namespace {

struct QpState {
    Matrix h;
    Vector xi;  // signed: positive entries are xi_plus, negative ones -xi_minus
};

double constraint_violation(const std::vector<Vector>& dirs, const Matrix& h, const Vector& lo, const Vector& hi) {
    double worst = 0.0;
    for (std::size_t j = 0; j < dirs.size(); ++j) {
        const auto jj = static_cast<Eigen::Index>(j);
        const double q = dirs[j].dot(h * dirs[j]);
        worst = std::max({worst, lo(jj) - q, q - hi(jj)});
    }
    return worst;
}

double dual_gap(const Matrix& h, const Vector& xi, const Vector& lo, const Vector& hi) {
    double linear = 0.0;
    for (Eigen::Index j = 0; j < xi.size(); ++j) {
        linear += xi(j) > 0.0 ? xi(j) * lo(j) : xi(j) * hi(j);
    }
    return (h * h).trace() - linear;
}

// Coordinates of a symmetric matrix in which the Frobenius inner product is
// the Euclidean one: diagonal entries, then sqrt2 times the upper entries.
Vector sym_coords(const Matrix& h) {
    const Eigen::Index d = h.rows();
    Vector w(d * (d + 1) / 2);
    Eigen::Index k = 0;
    for (Eigen::Index i = 0; i < d; ++i) w(k++) = h(i, i);
    for (Eigen::Index i = 0; i < d; ++i)
        for (Eigen::Index j = i + 1; j < d; ++j) w(k++) = std::numbers::sqrt2 * h(i, j);
    return w;
}

Matrix from_sym_coords(const Vector& w, Eigen::Index d) {
    Matrix h(d, d);
    Eigen::Index k = 0;
    for (Eigen::Index i = 0; i < d; ++i) h(i, i) = w(k++);
    for (Eigen::Index i = 0; i < d; ++i)
        for (Eigen::Index j = i + 1; j < d; ++j) h(i, j) = h(j, i) = w(k++) / std::numbers::sqrt2;
    return h;
}

// Lawson-Hanson active-set solve of min |E nu - f| subject to nu >= 0.
Vector nnls(const Matrix& e, const Vector& f) {
    const Eigen::Index k = e.cols();
    Vector nu = Vector::Zero(k);
    std::vector<bool> passive(static_cast<std::size_t>(k), false);
    const double tol = 1e-12 * std::max(1.0, e.cwiseAbs().maxCoeff() * f.cwiseAbs().maxCoeff());
    for (Eigen::Index outer = 0; outer < 3 * k + 3; ++outer) {
        const Vector grad = e.transpose() * (f - e * nu);
        Eigen::Index pick = -1;
        double best = tol;
        for (Eigen::Index j = 0; j < k; ++j) {
            if (!passive[static_cast<std::size_t>(j)] && grad(j) > best) {
                best = grad(j);
                pick = j;
            }
        }
        if (pick < 0) break;
        passive[static_cast<std::size_t>(pick)] = true;
        for (Eigen::Index inner = 0; inner < 3 * k + 3; ++inner) {
            std::vector<Eigen::Index> idx;
            for (Eigen::Index j = 0; j < k; ++j)
                if (passive[static_cast<std::size_t>(j)]) idx.push_back(j);
            Matrix sub(e.rows(), static_cast<Eigen::Index>(idx.size()));
            for (std::size_t c = 0; c < idx.size(); ++c) sub.col(static_cast<Eigen::Index>(c)) = e.col(idx[c]);
            const Vector z_sub = sub.completeOrthogonalDecomposition().solve(f);
            Vector z = Vector::Zero(k);
            for (std::size_t c = 0; c < idx.size(); ++c) z(idx[c]) = z_sub(static_cast<Eigen::Index>(c));
            bool positive = true;
            double alpha = 1.0;
            for (Eigen::Index j : idx) {
                if (z(j) <= 0.0) {
                    positive = false;
                    alpha = std::min(alpha, nu(j) / (nu(j) - z(j)));
                }
            }
            if (positive) {
                nu = z;
                break;
            }
            nu += alpha * (z - nu);
            for (Eigen::Index j : idx) {
                if (nu(j) <= 0.0) {
                    nu(j) = 0.0;
                    passive[static_cast<std::size_t>(j)] = false;
                }
            }
        }
    }
    return nu;
}

// Exact finite refinement: the primal is the least-distance program
// min |w| subject to a_j.w >= lo_j and -a_j.w >= -hi_j, which reduces to one
// NNLS solve. Accepted only when the KKT conditions hold, so the result is
// certified optimal.
bool polish(const std::vector<Vector>& dirs, const Vector& lo, const Vector& hi, double scale, double feas_tol,
            QpState& state) {
    const Eigen::Index d = dirs.front().size();
    const Eigen::Index dim = d * (d + 1) / 2;
    const Eigen::Index m = lo.size();
    Matrix e(dim + 1, 2 * m);
    for (Eigen::Index j = 0; j < m; ++j) {
        const Vector& u = dirs[static_cast<std::size_t>(j)];
        const Vector a = sym_coords(u * u.transpose());
        e.col(j) << a, lo(j) / scale;
        e.col(m + j) << -a, -hi(j) / scale;
    }
    Vector f = Vector::Zero(dim + 1);
    f(dim) = 1.0;
    const Vector nu = nnls(e, f);
    const Vector r = e * nu - f;
    if (!(std::abs(r(dim)) > 1e-14)) return false;  // infeasible band or breakdown
    const Vector lambda = nu / -r(dim);
    Vector w = -r.head(dim) / r(dim) * scale;

    // Sharpen on the identified active set.
    std::vector<Eigen::Index> active;
    for (Eigen::Index c = 0; c < 2 * m; ++c) {
        if (lambda(c) > 0.0) active.push_back(c);
    }
    if (!active.empty()) {
        Matrix rows(static_cast<Eigen::Index>(active.size()), dim);
        Vector b(static_cast<Eigen::Index>(active.size()));
        for (std::size_t i = 0; i < active.size(); ++i) {
            const Eigen::Index c = active[i];
            rows.row(static_cast<Eigen::Index>(i)) = e.col(c).head(dim).transpose();
            b(static_cast<Eigen::Index>(i)) = e(dim, c) * scale;
        }
        const Vector sharp = rows.completeOrthogonalDecomposition().solve(b);
        if (sharp.allFinite() && (rows * sharp - b).cwiseAbs().maxCoeff() <= feas_tol) w = sharp;
    }

    const Matrix h = from_sym_coords(w, d);
    if (!h.allFinite() || constraint_violation(dirs, h, lo, hi) > feas_tol) return false;
    Vector xi(m);
    for (Eigen::Index j = 0; j < m; ++j) {
        const double up = lambda(j) * scale;
        const double down = lambda(m + j) * scale;
        xi(j) = up - down;
        if (up > 0.0 && down > 0.0) return false;
        const double q = dirs[static_cast<std::size_t>(j)].dot(h * dirs[static_cast<std::size_t>(j)]);
        if (up > 0.0 && q - lo(j) > feas_tol) return false;
        if (down > 0.0 && hi(j) - q > feas_tol) return false;
    }
    state.h = h;
    state.xi = xi;
    return true;
}

}  // namespace

NetQpResult solve_net_qp(const std::vector<Vector>& directions, const Vector& targets, double delta,
                         const QpOptions& opt) {
    require(!directions.empty(), "net must contain at least one direction");
    require(static_cast<Eigen::Index>(directions.size()) == targets.size(), "one target per direction required");
    require(delta > 0.0 && delta < 0.5, "delta must lie in (0, 1/2)");
    require(opt.tol > 0.0 && opt.max_sweeps >= 1, "invalid QP options");
    require_finite(targets, "targets");
    require((targets.array() >= 0.0).all(), "targets must be non-negative");
    const Eigen::Index d = directions.front().size();
    for (const auto& u : directions) {
        require(u.size() == d, "directions must share one dimension");
        require_finite(u, "direction");
        require(u.norm() > 0.0, "directions must be non-zero");
    }

    const Eigen::Index m = targets.size();
    const Vector lo = (1.0 - delta) * targets;
    const Vector hi = (1.0 + delta) * targets;
    Vector kdiag(m);
    for (Eigen::Index j = 0; j < m; ++j) kdiag(j) = std::pow(directions[static_cast<std::size_t>(j)].squaredNorm(), 2);
    const double scale = std::max(targets.maxCoeff(), std::numeric_limits<double>::min());
    const double feas_tol = 1e-10 * scale;

    QpState state{Matrix::Zero(d, d), Vector::Zero(m)};
    NetQpResult res;
    bool certified = false;
    constexpr int kPolishEvery = 16;
    for (int sweep = 1; sweep <= opt.max_sweeps; ++sweep) {
        double biggest = 0.0;
        for (Eigen::Index j = 0; j < m; ++j) {
            const Vector& u = directions[static_cast<std::size_t>(j)];
            const double s = u.dot(state.h * u) - state.xi(j) * kdiag(j);
            double next = 0.0;
            if (lo(j) - s > 0.0) {
                next = (lo(j) - s) / kdiag(j);
            } else if (hi(j) - s < 0.0) {
                next = (hi(j) - s) / kdiag(j);
            }
            const double step = next - state.xi(j);
            if (step != 0.0) {
                state.h.noalias() += step * u * u.transpose();
                state.xi(j) = next;
            }
            biggest = std::max(biggest, std::abs(step));
        }
        res.sweeps = sweep;
        if (biggest < opt.tol * scale) {
            res.converged = true;
            break;
        }
        if (opt.polish && sweep % kPolishEvery == 0) {
            QpState trial = state;
            if (polish(directions, lo, hi, scale, feas_tol, trial)) {
                state = trial;
                certified = true;
                res.converged = true;
                break;
            }
        }
    }
    if (res.converged && !certified && opt.polish) {
        QpState trial = state;
        if (polish(directions, lo, hi, scale, feas_tol, trial)) state = trial;
    }
    state.h = symmetrize(state.h);
    res.duality_gap = dual_gap(state.h, state.xi, lo, hi);
    if (!res.converged) {
        throw NetQpFailure("dual QP did not converge after " + std::to_string(res.sweeps) + " sweeps; duality gap " + std::to_string(res.duality_gap),
                           res.duality_gap);
    }
    res.matrix = state.h;
    res.xi_plus = state.xi.cwiseMax(0.0);
    res.xi_minus = (-state.xi).cwiseMax(0.0);
    res.violation = std::max(0.0, constraint_violation(directions, state.h, lo, hi));
    return res;
}

GramEstimate robust_gram_net(const Sample& sample, const NetOptions& opt, const SphereNet& net) {
    validate(sample);
    require(!net.directions.empty(), "empty net");
    require(static_cast<std::size_t>(net.directions.front().size()) == sample.d(),
            "net dimension does not match the sample");
    double delta = 0.0;
    if (opt.delta) {
        delta = *opt.delta;
    } else if (opt.kappa) {
        const BoundsReport rep = core_bounds({*opt.kappa, static_cast<int>(sample.d()),
                                              static_cast<std::int64_t>(sample.n()), opt.eps});
        require(rep.feasible && !rep.delta_hat_infinite(), "certified deviation is infinite for this kurtosis");
        delta = rep.delta_hat;
    } else {
        throw InvalidInput("net method needs delta or kappa");
    }
    require(delta > 0.0 && delta < 0.5, "delta must lie in (0, 1/2)");

    Vector targets(static_cast<Eigen::Index>(net.directions.size()));
    for (std::size_t i = 0; i < net.directions.size(); ++i) {
        const Vector p = sample.x * net.directions[i];
        targets(static_cast<Eigen::Index>(i)) =
            opt.lambda ? solve_S(p, *opt.lambda, opt.solver).value : robust_energy(p, opt.eps, opt.solver).value;
    }
    const NetQpResult qp = solve_net_qp(net.directions, targets, delta, opt.qp);
    GramEstimate g;
    g.matrix = qp.matrix;
    g.method = GramMethod::robust_net;
    g.rank = numerical_rank(g.matrix);
    g.iterations_or_net_size = static_cast<int>(net.directions.size());
    g.constraint_violation = qp.violation;
    g.qp_sweeps = qp.sweeps;
    g.duality_gap = qp.duality_gap;
    return g;
}

GramEstimate positive_part(const GramEstimate& g) {
    require(g.matrix.rows() == g.matrix.cols(), "matrix must be square");
    const SymmetricEigen eig = symmetric_eigen(symmetrize(g.matrix));
    GramEstimate out = g;
    out.matrix = symmetrize(eig.vectors * eig.values.cwiseMax(0.0).asDiagonal() * eig.vectors.transpose());
    out.rank = numerical_rank(out.matrix);
    return out;
}

double eigenvalue_report(const Matrix& g1, const Matrix& g2) {
    require(g1.rows() == g1.cols() && g2.rows() == g2.cols() && g1.rows() == g2.rows(),
            "matrices must be square with one dimension");
    const Vector a = symmetric_eigen(symmetrize(g1)).values;
    const Vector b = symmetric_eigen(symmetrize(g2)).values;
    const double cut_a = rank_cutoff(a.cwiseAbs());
    const double cut_b = rank_cutoff(b.cwiseAbs());
    double worst = 0.0;
    for (Eigen::Index i = 0; i < a.size(); ++i) {
        const bool zero_a = std::abs(a(i)) <= cut_a;
        const bool zero_b = std::abs(b(i)) <= cut_b;
        if (zero_a && zero_b) continue;
        if (zero_a) return std::numeric_limits<double>::infinity();
        worst = std::max(worst, std::abs(b(i) / a(i) - 1.0));
    }
    return worst;
}

double eigenvalue_report(const GramEstimate& g1, const GramEstimate& g2) {
    return eigenvalue_report(g1.matrix, g2.matrix);
}

double quadratic_ratio_deviation(const Matrix& g, const Matrix& g_hat) {
    require(g.rows() == g.cols() && g_hat.rows() == g_hat.cols() && g.rows() == g_hat.rows(),
            "matrices must be square with one dimension");
    const SymmetricEigen eig = symmetric_eigen(symmetrize(g));
    const double cutoff = rank_cutoff(eig.values);
    const Eigen::Index d = g.rows();
    std::vector<Eigen::Index> image, kernel;
    for (Eigen::Index i = 0; i < d; ++i) (eig.values(i) > cutoff ? image : kernel).push_back(i);
    const Matrix gh = symmetrize(g_hat);
    const double scale = std::max(gh.cwiseAbs().maxCoeff(), std::numeric_limits<double>::min());
    for (Eigen::Index k : kernel) {
        if ((gh * eig.vectors.col(k)).cwiseAbs().maxCoeff() > kRankThreshold * scale) {
            return std::numeric_limits<double>::infinity();
        }
    }
    if (image.empty()) return 0.0;
    const auto k = static_cast<Eigen::Index>(image.size());
    Matrix w(d, k);
    for (Eigen::Index c = 0; c < k; ++c) {
        const Eigen::Index i = image[static_cast<std::size_t>(c)];
        w.col(c) = eig.vectors.col(i) / std::sqrt(eig.values(i));
    }
    const Vector ev = symmetric_eigen(symmetrize(w.transpose() * gh * w)).values;
    return std::max(std::abs(ev(0) - 1.0), std::abs(ev(k - 1) - 1.0));
}

}  // namespace gramlab

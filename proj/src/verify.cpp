#include "gramlab/verify.hpp"

#include "gramlab/bounds.hpp"
#include "gramlab/covariance.hpp"
#include "gramlab/direction_solver.hpp"
#include "gramlab/gram.hpp"
#include "gramlab/harness.hpp"
#include "gramlab/influence.hpp"
#include "gramlab/linalg.hpp"

#include <Eigen/QR>

#include <algorithm>
#include <chrono>
#include <functional>
#include <map>
#include <random>
#include <sstream>

#include <cmath>
#include <limits>
#include <numbers>

namespace gramlab {

QpOracleResult min_norm_qp_oracle_2d(const std::vector<Vector>& directions, const Vector& targets, double delta) {
    require(static_cast<Eigen::Index>(directions.size()) == targets.size(), "one target per direction required");
    // w = (h11, sqrt2 h12, h22) so that |w|^2 = Tr(H^2) and u'Hu = <a(u), w>.
    const Eigen::Index m = targets.size();
    std::vector<Eigen::Vector3d> rows;
    std::vector<double> rhs;
    std::vector<Eigen::Index> owner;
    std::vector<Eigen::Vector3d> a(static_cast<std::size_t>(m));
    for (Eigen::Index j = 0; j < m; ++j) {
        const Vector& u = directions[static_cast<std::size_t>(j)];
        require(u.size() == 2, "oracle works in dimension 2");
        a[static_cast<std::size_t>(j)] = {u(0) * u(0), std::numbers::sqrt2 * u(0) * u(1), u(1) * u(1)};
        for (double side : {1.0 - delta, 1.0 + delta}) {
            rows.push_back(a[static_cast<std::size_t>(j)]);
            rhs.push_back(side * targets(j));
            owner.push_back(j);
        }
    }
    const double tol = 1e-10 * std::max(1.0, targets.cwiseAbs().maxCoeff());
    auto feasible = [&](const Eigen::Vector3d& w) {
        for (Eigen::Index j = 0; j < m; ++j) {
            const double q = a[static_cast<std::size_t>(j)].dot(w);
            if (q < (1.0 - delta) * targets(j) - tol || q > (1.0 + delta) * targets(j) + tol) return false;
        }
        return true;
    };
    double best = std::numeric_limits<double>::infinity();
    Eigen::Vector3d best_w = Eigen::Vector3d::Zero();
    auto consider = [&](const std::vector<std::size_t>& set) {
        if (set.empty()) {
            if (feasible(Eigen::Vector3d::Zero())) best = 0.0;
            return;
        }
        Matrix k(static_cast<Eigen::Index>(set.size()), 3);
        Vector b(static_cast<Eigen::Index>(set.size()));
        for (std::size_t r = 0; r < set.size(); ++r) {
            k.row(static_cast<Eigen::Index>(r)) = rows[set[r]].transpose();
            b(static_cast<Eigen::Index>(r)) = rhs[set[r]];
        }
        const Matrix gram = k * k.transpose();
        const Vector coef = pseudo_inverse(gram) * b;
        const Eigen::Vector3d w = k.transpose() * coef;
        if ((k * w - b).cwiseAbs().maxCoeff() > tol) return;
        if (w.squaredNorm() < best && feasible(w)) {
            best = w.squaredNorm();
            best_w = w;
        }
    };
    const std::size_t c = rows.size();
    consider({});
    for (std::size_t i = 0; i < c; ++i) {
        consider({i});
        for (std::size_t j = i + 1; j < c; ++j) {
            if (owner[i] == owner[j]) continue;
            consider({i, j});
            for (std::size_t l = j + 1; l < c; ++l) {
                if (owner[l] == owner[j] || owner[l] == owner[i]) continue;
                consider({i, j, l});
            }
        }
    }
    require(std::isfinite(best), "band constraints are infeasible");
    QpOracleResult out;
    out.matrix = Matrix(2, 2);
    out.matrix << best_w(0), best_w(1) / std::numbers::sqrt2, best_w(1) / std::numbers::sqrt2, best_w(2);
    out.trace_square = best;
    return out;
}

double bisection_root(const Vector& p, double lambda, double lo, double hi, int steps) {
    for (int i = 0; i < steps; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        (r_lambda(p, lambda, mid) <= 0.0 ? lo : hi) = mid;
    }
    return hi;
}

bool SuiteResult::passed() const {
    return !checks.empty() && std::all_of(checks.begin(), checks.end(), [](const SuiteCheck& c) { return c.passed; });
}

std::string SuiteResult::summary() const {
    for (const auto& c : checks)
        if (!c.passed) return c.name + ": " + c.detail;
    std::string out;
    for (const auto& c : checks) out += (out.empty() ? "" : "; ") + c.detail;
    return out;
}

namespace {

std::string fmt(double v, int precision = 6) {
    std::ostringstream os;
    os.precision(precision);
    os << v;
    return os.str();
}

int scaled(int count, double scale) { return std::max(1, static_cast<int>(std::lround(count * scale))); }

struct Timer {
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
    double seconds() const { return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count(); }
};

Matrix random_psd(std::mt19937_64& rng, int d, double scale = 1.0) {
    std::normal_distribution<double> z;
    Matrix a(d, d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) a(i, j) = z(rng);
    return scale * a * a.transpose() / d;
}

Vector random_unit(std::mt19937_64& rng, int d) {
    std::normal_distribution<double> z;
    Vector v(d);
    do {
        for (int j = 0; j < d; ++j) v(j) = z(rng);
    } while (v.norm() == 0.0);
    return v.normalized();
}

Sample gaussian_rows(std::mt19937_64& rng, int n, const Matrix& root, const Vector& mean) {
    std::normal_distribution<double> z;
    const auto d = root.rows();
    Matrix w(n, d);
    for (int i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < d; ++j) w(i, j) = z(rng);
    Matrix x = w * root.transpose();
    x.rowwise() += mean.transpose();
    return Sample{x};
}

std::vector<double> grid(double lo, double hi, int points) {
    std::vector<double> xs(static_cast<std::size_t>(points));
    for (int i = 0; i < points; ++i) xs[static_cast<std::size_t>(i)] = lo + (hi - lo) * i / (points - 1);
    return xs;
}

ExperimentSpec rate_spec(ScenarioName name, std::size_t n, const VerifyOptions& opt) {
    ExperimentSpec s;
    s.scenario = Scenario::make(name);
    s.n = n;
    s.trials = scaled(2000, opt.scale);
    s.truncation = 1e3;
    s.seed = opt.seed;
    s.threads = opt.threads;
    return s;
}

}  // namespace

SuiteResult verify_mixture(const VerifyOptions& opt) {
    Timer timer;
    SuiteResult out{"mixture", {}, 0.0};
    int good = 0;
    bool ols_band = true, strictly_smaller = true;
    std::string detail;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        ExperimentSpec spec;
        spec.scenario = Scenario::make(ScenarioName::mixture_noise);
        spec.n = 100;
        spec.trials = scaled(500, opt.scale);
        spec.seed = seed;
        spec.threads = opt.threads;
        const ExperimentResult r = run_experiment(spec);
        const double erm = r.summary[0].mean, rob = r.summary[1].mean;
        const double gain = 1.0 - rob / erm;
        ols_band = ols_band && erm >= 1.2 && erm <= 2.4;
        strictly_smaller = strictly_smaller && rob < erm;
        if (rob <= 1.4 && gain >= 0.2) ++good;
        detail += (detail.empty() ? "" : ", ") + std::string("seed ") + std::to_string(seed) + " ols " + fmt(erm, 4) +
                  " robust " + fmt(rob, 4);
    }
    out.checks.push_back({"ols mean in [1.2, 2.4] for every seed", ols_band, detail});
    out.checks.push_back({"robust mean strictly smaller for every seed", strictly_smaller, "robust < ols"});
    out.checks.push_back({"robust <= 1.4 and improvement >= 20% in >= 4 of 5 seeds", good >= 4,
                          std::to_string(good) + "/5 seeds meet both"});
    out.runtime_seconds = timer.seconds();
    return out;
}

SuiteResult verify_rate_gaussian(const VerifyOptions& opt) {
    Timer timer;
    SuiteResult out{"rate", {}, 0.0};
    const RateResult r = rate_experiment(rate_spec(ScenarioName::gaussian_iid, 1000, opt));
    out.checks.push_back({"n E[min{excess, M}] / (sigma^2 d) in [0.85, 1.15]", r.ratio >= 0.85 && r.ratio <= 1.15,
                          "ratio " + fmt(r.ratio, 4) + " (se " + fmt(r.standard_error, 2) + ")"});
    out.checks.push_back({"no failed trials", r.missing == 0, std::to_string(r.missing) + " missing"});
    out.runtime_seconds = timer.seconds();
    return out;
}

SuiteResult verify_rate_two_radius(const VerifyOptions& opt) {
    Timer timer;
    SuiteResult out{"rate-mismatch", {}, 0.0};
    ExperimentSpec spec = rate_spec(ScenarioName::two_radius_sphere, 2000, opt);
    spec.scenario.params.d = 4;
    spec.scenario.params.a = 10.0;
    spec.scenario.params.b = 1.0;
    const AnalyticRecord rec = spec.scenario.analytic();
    const double shape = rec.rate_constant / (4.0 * rec.risk_star);
    out.checks.push_back({"C / (d R*) = 4 / (2 + a^2/b^2 + b^2/a^2)",
                          std::abs(shape - 4.0 / (2.0 + 100.0 + 0.01)) <= 1e-12, "C/(dR*) " + fmt(shape, 6)});
    const RateResult r = rate_experiment(spec);
    out.checks.push_back({"n E[min{excess, M}] / C in [0.8, 1.2]", r.ratio >= 0.8 && r.ratio <= 1.2,
                          "ratio " + fmt(r.ratio, 4) + " (se " + fmt(r.standard_error, 2) + ")"});
    out.runtime_seconds = timer.seconds();
    return out;
}

SuiteResult verify_coverage(const VerifyOptions& opt) {
    Timer timer;
    SuiteResult out{"coverage", {}, 0.0};
    ExperimentSpec spec;
    spec.scenario = Scenario::make(ScenarioName::gaussian_iid);
    spec.scenario.params.d = 2;
    spec.n = 5000;
    spec.eps = 0.01;
    spec.trials = scaled(1000, opt.scale);
    spec.seed = opt.seed;
    spec.threads = opt.threads;
    const CoverageResult c = coverage_experiment(spec, 500, 3.0);
    out.checks.push_back({"violation frequency <= 2 eps", c.violation_rate <= 2 * spec.eps,
                          "rate " + fmt(c.violation_rate, 4) + " over " + std::to_string(c.trials) +
                              " trials, worst sup-ratio " + fmt(c.worst_ratio, 4) + " vs threshold " +
                              fmt(c.threshold, 4)});
    out.runtime_seconds = timer.seconds();
    return out;
}

SuiteResult verify_solver(const VerifyOptions& opt) {
    Timer timer;
    SuiteResult out{"solver", {}, 0.0};
    std::mt19937_64 rng(opt.seed);
    std::uniform_int_distribution<int> size(5, 200);
    std::uniform_real_distribution<double> loglam(std::log(1e-3), 0.0);
    std::normal_distribution<double> z;
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    const SolverConfig cfg;
    const int instances = scaled(1000, opt.scale);
    int agree = 0, fewer = 0;
    double worst = 0.0;
    for (int i = 0; i < instances; ++i) {
        const int n = size(rng);
        const double lambda = std::exp(loglam(rng));
        const double scale = std::exp(2.0 * z(rng));
        Vector p(n);
        for (int k = 0; k < n; ++k) {
            switch (i % 3) {
                case 0:
                    p(k) = z(rng);
                    break;
                case 1:
                    p(k) = z(rng) / std::sqrt(std::max(u01(rng), 1e-12));  // heavy tail
                    break;
                default:
                    p(k) = std::exp(z(rng)) * (u01(rng) < 0.5 ? -1.0 : 1.0);
                    break;
            }
        }
        p *= scale;
        const DirectionalEstimate est = solve_S(p, lambda, cfg);
        if (est.alpha_infinite) {
            ++agree;
            continue;
        }
        const double ub = bisection_root(p, lambda, est.initial_lo, est.initial_hi, 200);
        const double rel = std::abs(est.value * ub - 1.0);
        worst = std::max(worst, rel);
        if (rel <= 1e-8) ++agree;
        // Halvings plain bisection needs for the same stopping rule.
        double lo = est.initial_lo, hi = est.initial_hi;
        int halvings = 0;
        while (hi - lo > cfg.rel_tol * hi && halvings < 10000) {
            const double mid = 0.5 * (lo + hi);
            (r_lambda(p, lambda, mid) <= 0.0 ? lo : hi) = mid;
            ++halvings;
        }
        if (est.iterations < halvings) ++fewer;
    }
    out.checks.push_back({"agreement with 200-step bisection to 1e-8 relative", agree == instances,
                          std::to_string(agree) + "/" + std::to_string(instances) + " agree, worst " + fmt(worst, 3)});
    out.checks.push_back({"fewer iterations than bisection in >= 90% of instances", fewer >= 0.9 * instances,
                          std::to_string(fewer) + "/" + std::to_string(instances) + " fewer"});
    out.runtime_seconds = timer.seconds();
    return out;
}

SuiteResult verify_qp(const VerifyOptions& opt) {
    Timer timer;
    SuiteResult out{"qp", {}, 0.0};
    std::mt19937_64 rng(opt.seed + 1000);
    std::uniform_real_distribution<double> noise(-1.0, 1.0);
    double worst_violation = 0.0, worst_trace = 0.0;
    int cases = 0;
    for (int count : {16, 32, 64}) {
        std::vector<Vector> dirs;
        for (int k = 0; k < count; ++k) {
            const double a = std::numbers::pi * k / count;
            dirs.push_back((Vector(2) << std::cos(a), std::sin(a)).finished());
        }
        for (double delta : {0.05, 0.2}) {
            for (int rep = 0; rep < 3; ++rep) {
                const Matrix g0 = random_psd(rng, 2, 1.0 + rep);
                Vector t(count);
                for (int k = 0; k < count; ++k) t(k) = dirs[k].dot(g0 * dirs[k]) * (1 + 0.5 * delta * noise(rng));
                const NetQpResult res = solve_net_qp(dirs, t, delta);
                for (int k = 0; k < count; ++k) {
                    const double q = dirs[k].dot(res.matrix * dirs[k]);
                    worst_violation =
                        std::max({worst_violation, (1 - delta) * t(k) - q, q - (1 + delta) * t(k)});
                }
                const QpOracleResult oracle = min_norm_qp_oracle_2d(dirs, t, delta);
                const double tr = (res.matrix * res.matrix).trace();
                worst_trace = std::max(worst_trace, std::abs(tr - oracle.trace_square) / oracle.trace_square);
                ++cases;
            }
        }
    }
    out.checks.push_back({"primal constraints within 1e-6", worst_violation <= 1e-6,
                          std::to_string(cases) + " cases, worst violation " + fmt(worst_violation, 3)});
    out.checks.push_back({"Tr(H^2) within 1e-6 relative of the brute-force oracle", worst_trace <= 1e-6,
                          "worst relative gap " + fmt(worst_trace, 3)});
    out.runtime_seconds = timer.seconds();
    return out;
}

SuiteResult verify_constants(const VerifyOptions&) {
    Timer timer;
    SuiteResult out{"constants", {}, 0.0};
    const double s2 = std::numbers::sqrt2;
    const double c = influence_constants().c;
    const double closed = 15.0 / (8.0 * std::log(2.0) * (s2 - 1.0)) * std::exp((1.0 + 2.0 * s2) / 2.0);
    out.checks.push_back({"c <= 44.3 and matches its closed form to 1e-12",
                          c <= 44.3 && std::abs(c - closed) <= 1e-12 * closed, "c = " + fmt(c, 15)});
    double best = 0.0;
    for (int i = 0; i <= 100; ++i) best = std::max(best, cq_constant(1.0 + i / 100.0));
    const double near1 = cq_constant(1.0 + 1e-6), near2 = cq_constant(2.0 - 1e-6);
    out.checks.push_back({"max C_q over the q-grid <= 1.4 + 1e-9", best <= 1.4 + 1e-9, "max " + fmt(best, 12)});
    out.checks.push_back({"C_q tends to 1 at both endpoints",
                          cq_constant(1.0) == 1.0 && cq_constant(2.0) == 1.0 && std::abs(near1 - 1.0) <= 1e-3 &&
                              std::abs(near2 - 1.0) <= 1e-3,
                          "C(1+1e-6) = " + fmt(near1, 8) + ", C(2-1e-6) = " + fmt(near2, 8)});
    const double k = (2.0 + 3.0 * c) / (4.0 * (2.0 + c));
    out.checks.push_back({"(2+3c)/(4(2+c)) <= 0.73",
                          k <= kDimensionCoefficient && std::abs(dimension_coefficient() - k) <= 1e-15,
                          "coefficient " + fmt(k, 8)});
    out.runtime_seconds = timer.seconds();
    return out;
}

SuiteResult verify_properties(const VerifyOptions& opt) {
    Timer timer;
    SuiteResult out{"properties", {}, 0.0};
    std::mt19937_64 rng(opt.seed + 2000);
    std::normal_distribution<double> z;

    {
        bool ok = true;
        double prev = -std::numeric_limits<double>::infinity();
        for (double x : grid(-10.0, 10.0, 20001)) {
            const double v = psi(x);
            ok = ok && -std::log(1.0 - x + 0.5 * x * x) <= v + 1e-15 && v <= std::log(1.0 + x + 0.5 * x * x) + 1e-15 &&
                 psi(-x) == -v && v >= prev && std::abs(v) <= std::log(2.0);
            prev = v;
        }
        out.checks.push_back({"psi sandwich, odd, monotone, bounded", ok, "20001-point grid on [-10, 10]"});
    }
    {
        double worst = -std::numeric_limits<double>::infinity();
        for (double p : {0.0, 0.5, 1.0, 1.5, 2.0})
            for (double x : grid(0.0, 20.0, 20001)) worst = std::max(worst, psi_gap(x) - std::pow(x, p + 1) / (p + 1));
        out.checks.push_back({"g(z) <= z^(p+1)/(p+1) for p in [0, 2]", worst <= 1e-15,
                              "max excess " + fmt(worst, 3)});
    }
    {
        double worst = 0.0;
        for (int d : {1, 2, 3, 5}) {
            for (int t = 0; t < 10; ++t) {
                Matrix g0 = random_psd(rng, d, 3.0);
                g0(0, 0) -= 1.0;
                const Matrix basis = symmetric_eigen(random_psd(rng, d)).vectors;
                const auto energy = [&](const Vector& v) { return v.dot(g0 * v); };
                const Matrix back = basis * polarize(energy, basis) * basis.transpose();
                worst = std::max(worst, (back - g0).cwiseAbs().maxCoeff() / std::max(1.0, g0.cwiseAbs().maxCoeff()));
            }
        }
        out.checks.push_back({"polarization exact to 1e-12", worst <= 1e-12, "worst " + fmt(worst, 3)});
    }
    {
        Sample s{Matrix(300, 3)};
        for (int i = 0; i < 300; ++i)
            for (int j = 0; j < 3; ++j) s.x(i, j) = z(rng) * (j + 1);
        double worst = 0.0;
        for (int t = 0; t < 20; ++t) {
            const Vector th = random_unit(rng, 3);
            const double base = estimate_direction(s, th).value;
            for (double f : {0.5, 2.0, 10.0})
                worst = std::max(worst, std::abs(estimate_direction(s, f * th).value / (base * f * f) - 1.0));
        }
        out.checks.push_back({"N-hat scale equivariance to 1e-9", worst <= 1e-9, "worst " + fmt(worst, 3)});
    }
    {
        double worst = 0.0;
        for (int t = 0; t < 10; ++t) {
            const Matrix root = Matrix::Random(3, 3);
            const Sample s = gaussian_rows(rng, 60, root, Vector::Constant(3, 5.0 * t));
            const Matrix c = empirical_covariance(s).matrix;
            worst = std::max(worst, (empirical_covariance_pairwise(s) - c).cwiseAbs().maxCoeff() / std::max(1.0, c.norm()));
        }
        out.checks.push_back({"covariance double sum equals centered form to 1e-12", worst <= 1e-12,
                              "worst " + fmt(worst, 3)});
    }
    {
        Matrix root(2, 2);
        root << 1.0, 0.0, 0.4, 0.7;
        const Sample s = gaussian_rows(rng, 500, root, Vector::Zero(2));
        const Matrix base = robust_covariance(s).matrix;
        double worst = 0.0;
        for (double norm : {1.0, 10.0, 1000.0}) {
            Sample moved = s;
            moved.x.rowwise() += (norm * random_unit(rng, 2)).transpose();
            worst = std::max(worst, (robust_covariance(moved).matrix - base).norm());
        }
        out.checks.push_back({"robust covariance translation invariant to 1e-8", worst <= 1e-8, "worst " + fmt(worst, 3)});
    }
    {
        std::uniform_real_distribution<double> u(-1.0, 1.0);
        double worst = -1.0;
        for (int d : {1, 2, 3}) {
            for (int t = 0; t < 30; ++t) {
                const Matrix g = random_psd(rng, d) + 0.1 * Matrix::Identity(d, d);
                const SymmetricEigen eg = symmetric_eigen(g);
                const Matrix root = eg.vectors * eg.values.cwiseSqrt().asDiagonal() * eg.vectors.transpose();
                Matrix e(d, d);
                for (int i = 0; i < d; ++i)
                    for (int j = 0; j < d; ++j) e(i, j) = u(rng);
                e = 0.5 * (e + e.transpose());
                e *= 0.2 / symmetric_eigen(e).values.cwiseAbs().maxCoeff();
                const Matrix gh = root * (Matrix::Identity(d, d) + e) * root;
                const double delta = quadratic_ratio_deviation(g, gh);
                worst = std::max(worst, eigenvalue_report(g, gh) - delta);
            }
        }
        out.checks.push_back({"eigenvalue deviation bounded by the quadratic-form deviation (d <= 3)", worst <= 1e-9,
                              "max excess " + fmt(worst, 3)});
    }
    out.runtime_seconds = timer.seconds();
    return out;
}

const std::vector<std::string>& suite_names() {
    static const std::vector<std::string> names = {"mixture", "rate",      "rate-mismatch", "coverage",
                                                   "solver",  "qp",        "constants",     "properties"};
    return names;
}

SuiteResult run_suite(const std::string& name, const VerifyOptions& opt) {
    static const std::map<std::string, std::function<SuiteResult(const VerifyOptions&)>> table = {
        {"mixture", verify_mixture},     {"rate", verify_rate_gaussian}, {"rate-mismatch", verify_rate_two_radius},
        {"coverage", verify_coverage},   {"solver", verify_solver},      {"qp", verify_qp},
        {"constants", verify_constants}, {"properties", verify_properties}};
    const auto it = table.find(name);
    if (it == table.end()) throw InvalidInput("unknown suite: " + name);
    return it->second(opt);
}

}  // namespace gramlab

#include "gramlab/harness.hpp"

#include "gramlab/bounds.hpp"
#include "gramlab/direction_solver.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>

namespace gramlab {

std::string to_string(Estimator e) {
    switch (e) {
        case Estimator::ols:
            return "ols";
        case Estimator::robust_iter:
            return "robust_iter";
        case Estimator::robust_net:
            return "robust_net";
    }
    return "unknown";
}

Estimator parse_estimator(const std::string& text) {
    std::string key = text;
    std::replace(key.begin(), key.end(), '-', '_');
    if (key == "ols" || key == "erm" || key == "empirical") return Estimator::ols;
    if (key == "robust_iter" || key == "robust") return Estimator::robust_iter;
    if (key == "robust_net") return Estimator::robust_net;
    throw InvalidInput("unknown estimator: " + text);
}

int resolve_threads(int requested) {
    if (requested > 0) return requested;
    if (const char* env = std::getenv("GRAMLAB_THREADS")) {
        const int v = std::atoi(env);
        if (v > 0) return v;
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

void parallel_for(int count, int threads, const std::function<void(int)>& body) {
    const int workers = std::max(1, std::min(resolve_threads(threads), count));
    if (workers == 1) {
        for (int i = 0; i < count; ++i) body(i);
        return;
    }
    std::atomic<int> next{0};
    std::exception_ptr failure;
    std::mutex guard;
    auto work = [&] {
        for (int i = next++; i < count; i = next++) {
            try {
                body(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(guard);
                if (!failure) failure = std::current_exception();
                next = count;
            }
        }
    };
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
}

Matrix plug_in_extended(const Scenario& scenario, std::size_t rows, std::uint64_t seed) {
    // A trial index no experiment reaches, so the stream is disjoint from trial data.
    const LabeledSample s = scenario.generate(rows, seed, ~std::uint64_t{0});
    const Matrix e = s.extended().x;
    return e.transpose() * e / static_cast<double>(rows);
}

double truncated_mean(const std::vector<double>& values, double m) {
    require(!values.empty(), "truncated mean of an empty set");
    double sum = 0.0;
    for (double v : values) sum += std::min(v, m);
    return sum / static_cast<double>(values.size());
}

double lower_quantile(std::vector<double> values, double prob) {
    require(!values.empty(), "quantile of an empty set");
    require(prob >= 0.0 && prob <= 1.0, "quantile level must lie in [0, 1]");
    std::sort(values.begin(), values.end());
    const auto n = static_cast<double>(values.size());
    const auto k = static_cast<std::ptrdiff_t>(std::ceil(prob * n - 1e-12)) - 1;
    return values[static_cast<std::size_t>(std::clamp<std::ptrdiff_t>(k, 0, values.size() - 1))];
}

namespace {

std::vector<double> column(const std::vector<TrialRecord>& records, std::size_t k) {
    std::vector<double> out;
    for (const auto& r : records)
        if (r.excess[k]) out.push_back(*r.excess[k]);
    return out;
}

RegressionFit fit_with(Estimator e, const LabeledSample& s, const ExperimentSpec& spec, const AnalyticRecord* rec) {
    if (e == Estimator::ols) return ols(s);
    RobustLsOptions opt = spec.robust;
    opt.eps = spec.eps;
    opt.backend = e == Estimator::robust_net ? GramMethod::robust_net : GramMethod::robust_iter;
    if (e == Estimator::robust_net && !opt.delta && !opt.kappa1 && rec) {
        opt.kappa1 = rec->kappa1;
        opt.kappa2 = rec->kappa2;
    }
    return robust_ls(s, opt);
}

}  // namespace

std::vector<EstimatorSummary> summarize(const std::vector<Estimator>& estimators,
                                        const std::vector<TrialRecord>& records,
                                        std::optional<double> truncation) {
    std::vector<EstimatorSummary> out;
    for (std::size_t k = 0; k < estimators.size(); ++k) {
        EstimatorSummary s;
        s.estimator = estimators[k];
        const auto values = column(records, k);
        s.count = static_cast<int>(values.size());
        s.missing = static_cast<int>(records.size()) - s.count;
        if (!values.empty()) {
            double sum = 0.0;
            for (double v : values) sum += v;
            s.mean = sum / static_cast<double>(values.size());
            s.median = lower_quantile(values, 0.5);
            if (truncation) s.truncated_mean = truncated_mean(values, *truncation);
        } else {
            s.mean = s.median = std::numeric_limits<double>::quiet_NaN();
        }
        out.push_back(s);
    }
    return out;
}

ExperimentResult run_experiment(const ExperimentSpec& spec) {
    require(spec.trials >= 1, "trials must be at least 1");
    require(spec.n >= 1, "sample size must be at least 1");
    require(!spec.estimators.empty(), "at least one estimator is required");
    if (spec.truncation) require(*spec.truncation > 0.0, "truncation must be positive");
    const auto start = std::chrono::steady_clock::now();
    const AnalyticRecord rec = spec.scenario.analytic();

    ExperimentResult result;
    result.estimators = spec.estimators;
    result.plug_in = spec.plug_in;
    result.reference_extended = spec.plug_in ? plug_in_extended(spec.scenario, 1000000, spec.seed) : rec.extended;
    result.records.resize(static_cast<std::size_t>(spec.trials));

    parallel_for(spec.trials, spec.threads, [&](int t) {
        TrialRecord r;
        r.trial = t;
        const LabeledSample s = spec.scenario.generate(spec.n, spec.seed, static_cast<std::uint64_t>(t));
        for (Estimator e : spec.estimators) {
            try {
                const RegressionFit fit = fit_with(e, s, spec, &rec);
                require_finite(fit.theta, "fitted parameter");
                r.excess.emplace_back(excess_risk(fit.theta, result.reference_extended));
                r.errors.emplace_back();
            } catch (const std::exception& ex) {
                r.excess.emplace_back(std::nullopt);
                r.errors.emplace_back(ex.what());
            }
        }
        result.records[static_cast<std::size_t>(t)] = std::move(r);
    });

    result.summary = summarize(result.estimators, result.records, spec.truncation);
    result.runtime_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return result;
}

QuantileTable quantile_table(const ExperimentResult& result) {
    require(!result.records.empty(), "quantile table needs at least one record");
    QuantileTable q;
    q.header.push_back("percentile");
    for (Estimator e : result.estimators) q.header.push_back(to_string(e));
    q.values = Matrix(101, static_cast<Eigen::Index>(result.estimators.size()) + 1);
    for (int p = 0; p <= 100; ++p) q.values(p, 0) = p;
    for (std::size_t k = 0; k < result.estimators.size(); ++k) {
        const auto values = column(result.records, k);
        for (int p = 0; p <= 100; ++p)
            q.values(p, static_cast<Eigen::Index>(k) + 1) =
                values.empty() ? std::numeric_limits<double>::quiet_NaN() : lower_quantile(values, p / 100.0);
    }
    return q;
}

CoverageResult coverage_experiment(const ExperimentSpec& spec, int directions, double kappa,
                                   const DirectionEnergy& energy) {
    require(spec.trials >= 1, "trials must be at least 1");
    require(directions >= 1, "direction grid must be non-empty");
    const AnalyticRecord rec = spec.scenario.analytic();
    const int d = spec.scenario.dimension();
    const BoundsReport b = core_bounds({kappa, d, static_cast<std::int64_t>(spec.n), spec.eps});
    if (!b.feasible || b.delta_hat_infinite())
        throw InvalidInput("bounds infeasible for this (kappa, d, n, eps): mu = " + std::to_string(b.mu) +
                           " must be below 1/2");

    CoverageResult out;
    out.threshold = b.delta_hat;
    out.lambda = b.lambda;
    out.trials = spec.trials;

    std::mt19937_64 rng = trial_engine(spec.seed, ~std::uint64_t{0} - 1);
    std::normal_distribution<double> z;
    std::vector<Vector> grid;
    for (int k = 0; k < directions; ++k) {
        Vector th(d);
        do {
            for (int j = 0; j < d; ++j) th(j) = z(rng);
        } while (th.norm() == 0.0);
        grid.push_back(th.normalized());
    }

    const double lambda = b.lambda;
    const SolverConfig cfg = spec.robust.solver;
    DirectionEnergy est = energy ? energy : DirectionEnergy([lambda, cfg](const Sample& s, const Vector& th) {
        return estimate_direction_fixed(s, th, lambda, cfg).value;
    });

    out.sup_ratio.assign(static_cast<std::size_t>(spec.trials), 0.0);
    parallel_for(spec.trials, spec.threads, [&](int t) {
        const Sample s = spec.scenario.generate(spec.n, spec.seed, static_cast<std::uint64_t>(t)).design();
        double sup = 0.0;
        for (const Vector& th : grid) {
            const double truth = th.dot(rec.gram * th);
            const double hat = est(s, th);
            const double dev = hat > 0.0 ? std::abs(truth / hat - 1.0) : std::numeric_limits<double>::infinity();
            sup = std::max(sup, dev);
        }
        out.sup_ratio[static_cast<std::size_t>(t)] = sup;
    });
    for (double s : out.sup_ratio) {
        if (s > out.threshold) ++out.violations;
        out.worst_ratio = std::max(out.worst_ratio, s);
    }
    out.violation_rate = static_cast<double>(out.violations) / spec.trials;
    return out;
}

RateResult rate_experiment(const ExperimentSpec& spec) {
    ExperimentSpec s = spec;
    s.estimators = {Estimator::ols};
    if (!s.truncation) s.truncation = 1e3;
    const AnalyticRecord rec = s.scenario.analytic();
    require(rec.rate_constant > 0.0, "scenario has no positive analytic rate constant");
    const ExperimentResult r = run_experiment(s);
    const auto values = column(r.records, 0);
    require(!values.empty(), "every trial failed");
    const double m = *s.truncation;
    const double n = static_cast<double>(s.n);
    double sum = 0.0, sq = 0.0;
    for (double v : values) {
        const double c = std::min(v, m);
        sum += c;
        sq += c * c;
    }
    const double k = static_cast<double>(values.size());
    const double mean = sum / k;
    const double var = k > 1 ? std::max(0.0, (sq - k * mean * mean) / (k - 1)) : 0.0;
    RateResult out;
    out.truncation = m;
    out.c_analytic = rec.rate_constant;
    out.normalized_rate = n * mean;
    out.ratio = out.normalized_rate / out.c_analytic;
    out.standard_error = n * std::sqrt(var / k) / out.c_analytic;
    out.missing = r.summary[0].missing;
    return out;
}

MeanBoundCoverage mean_bound_coverage(double q, std::int64_t n, double eps, int repetitions, std::uint64_t seed) {
    constexpr double alpha = 2.5;
    require(q >= 1.0 && q < alpha, "exponent q must lie in [1, 2.5)");
    require(n >= 1 && repetitions >= 1, "n and repetitions must be positive");
    const double xm = (alpha - 1.0) / alpha;  // unit mean
    const double ewq = alpha * std::pow(xm, q) / (alpha - q);
    MeanBoundCoverage out;
    out.bound = truncated_mean_bound(1.0, ewq, q, n, eps);
    out.repetitions = repetitions;
    int hits = 0;
    for (int r = 0; r < repetitions; ++r) {
        std::mt19937_64 rng = trial_engine(seed, static_cast<std::uint64_t>(r));
        std::uniform_real_distribution<double> u(0.0, 1.0);
        double sum = 0.0;
        for (std::int64_t i = 0; i < n; ++i) sum += xm * std::pow(1.0 - u(rng), -1.0 / alpha);
        if (sum / static_cast<double>(n) > out.bound) ++hits;
    }
    out.frequency = static_cast<double>(hits) / repetitions;
    out.standard_error = std::sqrt(std::max(out.frequency * (1.0 - out.frequency), 2 * eps * (1 - 2 * eps)) / repetitions);
    return out;
}

}  // namespace gramlab

#pragma once

#include "gramlab/regression.hpp"
#include "gramlab/scenarios.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace gramlab {

enum class Estimator { ols, robust_iter, robust_net };

std::string to_string(Estimator e);
// Accepts snake_case and kebab-case spellings.
Estimator parse_estimator(const std::string& text);

struct ExperimentSpec {
    Scenario scenario;
    int trials = 100;
    std::size_t n = 100;
    std::vector<Estimator> estimators{Estimator::ols, Estimator::robust_iter};
    double eps = kDefaultConfidence;
    std::uint64_t seed = 1;
    std::optional<double> truncation;  // M in E[min{excess, M}]
    int threads = 0;                   // 0: GRAMLAB_THREADS, else hardware concurrency
    RobustLsOptions robust;            // eps is taken from the spec
    // Replace the analytic second moments by a 10^6-row plug-in.
    bool plug_in = false;
};

struct TrialRecord {
    int trial = 0;
    std::vector<std::optional<double>> excess;  // per estimator; empty on failure
    std::vector<std::string> errors;            // per estimator; empty on success
};

struct EstimatorSummary {
    Estimator estimator = Estimator::ols;
    double mean = 0.0;
    double median = 0.0;
    std::optional<double> truncated_mean;
    int count = 0;
    int missing = 0;
};

struct ExperimentResult {
    std::vector<Estimator> estimators;
    std::vector<TrialRecord> records;
    std::vector<EstimatorSummary> summary;
    Matrix reference_extended;
    bool plug_in = false;
    double runtime_seconds = 0.0;
};

int resolve_threads(int requested);

// Runs body(i) for i in [0, count) on up to `threads` workers.
void parallel_for(int count, int threads, const std::function<void(int)>& body);

// Second moments of (x, -y) from `rows` fresh draws of a dedicated stream.
Matrix plug_in_extended(const Scenario& scenario, std::size_t rows, std::uint64_t seed);

ExperimentResult run_experiment(const ExperimentSpec& spec);

// Recomputes summaries from records only.
std::vector<EstimatorSummary> summarize(const std::vector<Estimator>& estimators,
                                        const std::vector<TrialRecord>& records,
                                        std::optional<double> truncation);

double truncated_mean(const std::vector<double>& values, double m);

// Type-1 (lower) empirical quantile: the smallest value v with F(v) >= prob.
double lower_quantile(std::vector<double> values, double prob);

struct QuantileTable {
    std::vector<std::string> header;  // "percentile", then one column per estimator
    Matrix values;                    // 101 rows
};

QuantileTable quantile_table(const ExperimentResult& result);

// Energy hook for coverage: returns the estimate of theta' G theta.
using DirectionEnergy = std::function<double(const Sample&, const Vector&)>;

struct CoverageResult {
    double violation_rate = 0.0;
    double worst_ratio = 0.0;  // largest sup-ratio deviation over trials
    double threshold = 0.0;    // mu / (1 - 2 mu)
    double lambda = 0.0;
    int violations = 0;
    int trials = 0;
    std::vector<double> sup_ratio;  // per trial
};

// Directional estimator at the fixed scale of the core bounds, compared with
// the analytic energy over `directions` seeded random unit directions.
// Throws InvalidInput when the bounds are infeasible.
CoverageResult coverage_experiment(const ExperimentSpec& spec, int directions, double kappa,
                                   const DirectionEnergy& energy = {});

struct RateResult {
    double normalized_rate = 0.0;  // n E[min{excess, M}]
    double c_analytic = 0.0;
    double ratio = 0.0;
    double standard_error = 0.0;  // of the ratio
    double truncation = 0.0;
    int missing = 0;
};

// OLS only; M defaults to 1e3.
RateResult rate_experiment(const ExperimentSpec& spec);

struct MeanBoundCoverage {
    double frequency = 0.0;
    double bound = 0.0;
    double standard_error = 0.0;
    int repetitions = 0;
};

// Frequency of the empirical mean of n Pareto(2.5) draws with mean 1
// exceeding truncated_mean_bound at exponent q.
MeanBoundCoverage mean_bound_coverage(double q, std::int64_t n, double eps, int repetitions, std::uint64_t seed);

}  // namespace gramlab

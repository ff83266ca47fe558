#pragma once

#include "gramlab/types.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace gramlab {

struct QpOracleResult {
    Matrix matrix;
    double trace_square = 0.0;
};

// Minimum Frobenius norm 2x2 H under the net band constraints, by exhaustive
// enumeration of active sets of size at most three.
QpOracleResult min_norm_qp_oracle_2d(const std::vector<Vector>& directions, const Vector& targets, double delta);

// Plain bisection on u for sup{u : r(u) <= 0} from the solver's own starting bracket.
double bisection_root(const Vector& p, double lambda, double lo, double hi, int steps = 200);

struct SuiteCheck {
    std::string name;
    bool passed = false;
    std::string detail;
};

struct SuiteResult {
    std::string suite;
    std::vector<SuiteCheck> checks;
    double runtime_seconds = 0.0;

    bool passed() const;
    // First failing check, or every check's detail joined when all pass.
    std::string summary() const;
};

struct VerifyOptions {
    std::uint64_t seed = 1;
    int threads = 0;
    // Multiplies Monte Carlo trial counts; 1 reproduces the acceptance sizes.
    double scale = 1.0;
};

SuiteResult verify_mixture(const VerifyOptions& opt = {});
SuiteResult verify_rate_gaussian(const VerifyOptions& opt = {});
SuiteResult verify_rate_two_radius(const VerifyOptions& opt = {});
SuiteResult verify_coverage(const VerifyOptions& opt = {});
SuiteResult verify_solver(const VerifyOptions& opt = {});
SuiteResult verify_qp(const VerifyOptions& opt = {});
SuiteResult verify_constants(const VerifyOptions& opt = {});
SuiteResult verify_properties(const VerifyOptions& opt = {});

// mixture, rate, rate-mismatch, coverage, solver, qp, constants, properties.
const std::vector<std::string>& suite_names();
SuiteResult run_suite(const std::string& name, const VerifyOptions& opt = {});

}  // namespace gramlab

#pragma once

#include "gramlab/types.hpp"

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace gramlab {

enum class ScenarioName {
    mixture_noise,
    censored_gaussian,
    scaled_gaussian_rademacher,
    two_radius_sphere,
    histogram_design,
    gaussian_iid
};

std::string to_string(ScenarioName name);
// Accepts snake_case and kebab-case spellings.
ScenarioName parse_scenario_name(const std::string& text);
const std::vector<ScenarioName>& all_scenarios();

// Per-trial stream: the trial index is mixed into the root seed by a fixed
// 64-bit hash, so trials are independent of evaluation order.
std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t trial);
std::mt19937_64 trial_engine(std::uint64_t seed, std::uint64_t trial);

// Two-point radius with E rho^2 = 1 and E rho^4 = m4 >= 1:
// rho^2 = 2 m4 - 1 with probability 1/(4 m4 - 3), else 1/2.
struct RadialLaw {
    double lo = 1.0;
    double hi = 1.0;
    double p_hi = 1.0;

    static RadialLaw from_fourth_moment(double m4);
    double moment(double k) const;  // E rho^k
    double draw(std::mt19937_64& rng) const;
};

struct ScenarioParams {
    int d = 2;
    double sigma = 1.0;          // Gaussian noise scale (gaussian_iid, censored, histogram)
    double p = 0.5;              // censoring probability of keeping a row
    double a = 10.0;             // two radii
    double b = 1.0;
    double rho_m4 = 1.0;         // E rho^4 of the scaled Gaussian radius
    double mix_weight = 0.1;     // weight of the wide noise component
    double noise_narrow = 1.0;
    double noise_wide = 30.0;
    double design_scale = 10.0;
    double intercept = 1.0;
    std::optional<Vector> theta_star;  // defaults to the all-ones vector
};

ScenarioParams default_params(ScenarioName name);

struct AnalyticRecord {
    Matrix gram;      // E xx'
    Matrix extended;  // second moments of (x, -y)
    Vector theta_star;
    double kappa1 = 0.0;
    double kappa2 = 0.0;
    double rate_constant = 0.0;  // C = E[(y - <theta*, x>)^2 |G^{-1/2} x|^2]
    double risk_star = 0.0;
};

struct Scenario {
    ScenarioName name = ScenarioName::gaussian_iid;
    ScenarioParams params;

    static Scenario make(ScenarioName name);
    int dimension() const;
    Vector theta_star() const;
    AnalyticRecord analytic() const;
    // Deterministic in (seed, trial).
    LabeledSample generate(std::size_t n, std::uint64_t seed, std::uint64_t trial = 0) const;
};

// Named generators with default parameters where not given.
LabeledSample gen_mixture_noise(std::size_t n, std::uint64_t seed);
LabeledSample gen_censored_gaussian(std::size_t n, double p, int d, std::uint64_t seed);
LabeledSample gen_scaled_gaussian_rademacher(std::size_t n, int d, const RadialLaw& rho, std::uint64_t seed);
LabeledSample gen_two_radius_sphere(std::size_t n, int d, double a, double b, std::uint64_t seed);
Sample gen_histogram_design(std::size_t n, int d, std::uint64_t seed);

}  // namespace gramlab

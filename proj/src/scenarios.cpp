#include "gramlab/scenarios.hpp"

#include <algorithm>
#include <cmath>

namespace gramlab {

std::string to_string(ScenarioName name) {
    switch (name) {
        case ScenarioName::mixture_noise:
            return "mixture_noise";
        case ScenarioName::censored_gaussian:
            return "censored_gaussian";
        case ScenarioName::scaled_gaussian_rademacher:
            return "scaled_gaussian_rademacher";
        case ScenarioName::two_radius_sphere:
            return "two_radius_sphere";
        case ScenarioName::histogram_design:
            return "histogram_design";
        case ScenarioName::gaussian_iid:
            return "gaussian_iid";
    }
    return "unknown";
}

const std::vector<ScenarioName>& all_scenarios() {
    static const std::vector<ScenarioName> names = {
        ScenarioName::mixture_noise,     ScenarioName::censored_gaussian, ScenarioName::scaled_gaussian_rademacher,
        ScenarioName::two_radius_sphere, ScenarioName::histogram_design,  ScenarioName::gaussian_iid};
    return names;
}

ScenarioName parse_scenario_name(const std::string& text) {
    std::string key = text;
    std::replace(key.begin(), key.end(), '-', '_');
    for (ScenarioName n : all_scenarios()) {
        if (to_string(n) == key) return n;
    }
    throw InvalidInput("unknown scenario: " + text);
}

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

}  // namespace

std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t trial) {
    return splitmix64(splitmix64(seed) ^ splitmix64(trial + 0x632be59bd9b4e019ULL));
}

std::mt19937_64 trial_engine(std::uint64_t seed, std::uint64_t trial) {
    return std::mt19937_64(substream_seed(seed, trial));
}

RadialLaw RadialLaw::from_fourth_moment(double m4) {
    require(std::isfinite(m4) && m4 >= 1.0, "fourth moment of a unit second-moment radius must be >= 1");
    RadialLaw r;
    r.lo = std::sqrt(0.5);
    r.hi = std::sqrt(2.0 * m4 - 1.0);
    r.p_hi = 1.0 / (4.0 * m4 - 3.0);
    return r;
}

double RadialLaw::moment(double k) const {
    return (1.0 - p_hi) * std::pow(lo, k) + p_hi * std::pow(hi, k);
}

double RadialLaw::draw(std::mt19937_64& rng) const {
    if (p_hi >= 1.0) return hi;
    return std::bernoulli_distribution(p_hi)(rng) ? hi : lo;
}

ScenarioParams default_params(ScenarioName name) {
    ScenarioParams p;
    switch (name) {
        case ScenarioName::mixture_noise:
            p.d = 2;
            break;
        case ScenarioName::censored_gaussian:
            p.d = 5;
            break;
        case ScenarioName::scaled_gaussian_rademacher:
            p.d = 3;
            p.rho_m4 = 5.0;
            break;
        case ScenarioName::two_radius_sphere:
            p.d = 4;
            break;
        case ScenarioName::histogram_design:
            p.d = 4;
            break;
        case ScenarioName::gaussian_iid:
            p.d = 3;
            break;
    }
    return p;
}

Scenario Scenario::make(ScenarioName name) { return Scenario{name, default_params(name)}; }

int Scenario::dimension() const { return name == ScenarioName::mixture_noise ? 2 : params.d; }

Vector Scenario::theta_star() const {
    const int d = dimension();
    if (params.theta_star) {
        require(params.theta_star->size() == d, "theta_star dimension does not match the scenario");
        return *params.theta_star;
    }
    if (name == ScenarioName::mixture_noise) return (Vector(2) << 1.0, params.intercept).finished();
    return Vector::Ones(d);
}

namespace {

void check_params(const Scenario& s) {
    const ScenarioParams& p = s.params;
    require(s.dimension() >= 1, "dimension must be at least 1");
    require(p.sigma >= 0.0 && std::isfinite(p.sigma), "sigma must be finite and non-negative");
    switch (s.name) {
        case ScenarioName::mixture_noise:
            require(p.mix_weight >= 0.0 && p.mix_weight <= 1.0, "mixture weight must lie in [0, 1]");
            require(p.noise_narrow >= 0.0 && p.noise_wide >= 0.0 && p.design_scale > 0.0,
                    "mixture scales must be non-negative");
            break;
        case ScenarioName::censored_gaussian:
            require(p.p > 0.0 && p.p <= 1.0, "censoring probability must lie in (0, 1]");
            break;
        case ScenarioName::scaled_gaussian_rademacher:
            require(p.rho_m4 >= 1.0, "E rho^4 must be at least 1");
            break;
        case ScenarioName::two_radius_sphere:
            require(p.a > 0.0 && p.b > 0.0, "radii must be positive");
            break;
        default:
            break;
    }
}

// Second moments of (x, -y) when the residual is uncorrelated with x.
Matrix extended_from(const Matrix& a, const Vector& theta, double risk_star) {
    const Eigen::Index d = a.rows();
    const Vector xy = a * theta;
    Matrix g(d + 1, d + 1);
    g.topLeftCorner(d, d) = a;
    g.topRightCorner(d, 1) = -xy;
    g.bottomLeftCorner(1, d) = -xy.transpose();
    g(d, d) = theta.dot(xy) + risk_star;
    return g;
}

}  // namespace

AnalyticRecord Scenario::analytic() const {
    check_params(*this);
    const ScenarioParams& p = params;
    const int d = dimension();
    const double dd = d;
    AnalyticRecord r;
    r.theta_star = theta_star();
    switch (name) {
        case ScenarioName::mixture_noise: {
            const double s2 = p.design_scale * p.design_scale;
            r.gram = Matrix::Zero(2, 2);
            r.gram(0, 0) = s2;
            r.gram(1, 1) = 1.0;
            const double n2 = (1 - p.mix_weight) * std::pow(p.noise_narrow, 2) + p.mix_weight * std::pow(p.noise_wide, 2);
            const double n4 =
                3.0 * ((1 - p.mix_weight) * std::pow(p.noise_narrow, 4) + p.mix_weight * std::pow(p.noise_wide, 4));
            r.risk_star = n2;
            // Whitened design (Z, 1): sup of E(aZ + b)^4 over a^2 + b^2 = 1 is 3.
            r.kappa1 = 3.0;
            r.kappa2 = n2 > 0.0 ? n4 / (n2 * n2) : 0.0;
            r.rate_constant = n2 * 2.0;
            break;
        }
        case ScenarioName::censored_gaussian:
            r.gram = p.p * Matrix::Identity(d, d);
            r.risk_star = p.p * p.sigma * p.sigma;
            r.kappa1 = 3.0 / p.p;
            r.kappa2 = p.sigma > 0.0 ? 3.0 / p.p : 0.0;
            r.rate_constant = p.sigma * p.sigma * dd;
            break;
        case ScenarioName::scaled_gaussian_rademacher: {
            const double m4 = p.rho_m4;
            r.gram = Matrix::Identity(d, d);
            r.risk_star = dd;
            r.kappa1 = 3.0 * m4;
            r.kappa2 = (1.0 + 2.0 / dd) * m4;
            r.rate_constant = (1.0 + 2.0 / dd) / (4.0 + 2.0 / dd) * (r.kappa1 + r.kappa2) * r.risk_star * dd;
            break;
        }
        case ScenarioName::two_radius_sphere: {
            const double a2 = p.a * p.a, b2 = p.b * p.b;
            r.gram = (a2 + b2) / (2.0 * dd) * Matrix::Identity(d, d);
            r.risk_star = (1.0 / a2 + 1.0 / b2) / 2.0;
            r.rate_constant = 2.0 * dd / (a2 + b2);
            const double m2 = (a2 + b2) / 2.0, m4 = (a2 * a2 + b2 * b2) / 2.0;
            r.kappa1 = m4 / (m2 * m2) * 3.0 * dd / (dd + 2.0);
            const double i2 = (1.0 / a2 + 1.0 / b2) / 2.0, i4 = (1.0 / (a2 * a2) + 1.0 / (b2 * b2)) / 2.0;
            r.kappa2 = i4 / (i2 * i2);
            break;
        }
        case ScenarioName::histogram_design:
            r.gram = Matrix::Identity(d, d) / dd;
            r.risk_star = p.sigma * p.sigma;
            r.kappa1 = dd;
            r.kappa2 = p.sigma > 0.0 ? 3.0 : 0.0;
            r.rate_constant = p.sigma * p.sigma * dd;
            break;
        case ScenarioName::gaussian_iid:
            r.gram = Matrix::Identity(d, d);
            r.risk_star = p.sigma * p.sigma;
            r.kappa1 = 3.0;
            r.kappa2 = p.sigma > 0.0 ? 3.0 : 0.0;
            r.rate_constant = p.sigma * p.sigma * dd;
            break;
    }
    r.extended = extended_from(r.gram, r.theta_star, r.risk_star);
    return r;
}

LabeledSample Scenario::generate(std::size_t n, std::uint64_t seed, std::uint64_t trial) const {
    check_params(*this);
    require(n >= 1, "sample size must be at least 1");
    std::mt19937_64 rng = trial_engine(seed, trial);
    std::normal_distribution<double> z;
    std::bernoulli_distribution coin(0.5);
    const ScenarioParams& p = params;
    const int d = dimension();
    const Vector th = theta_star();
    const auto rows = static_cast<Eigen::Index>(n);
    LabeledSample s{Matrix(rows, d), Vector(rows)};
    switch (name) {
        case ScenarioName::mixture_noise: {
            std::bernoulli_distribution wide(p.mix_weight);
            for (Eigen::Index i = 0; i < rows; ++i) {
                const double x = p.design_scale * z(rng);
                const double eta = (wide(rng) ? p.noise_wide : p.noise_narrow) * z(rng);
                s.x(i, 0) = x;
                s.x(i, 1) = 1.0;
                s.y(i) = th(0) * x + th(1) + eta;
            }
            break;
        }
        case ScenarioName::censored_gaussian: {
            std::bernoulli_distribution keep(p.p);
            for (Eigen::Index i = 0; i < rows; ++i) {
                for (int j = 0; j < d; ++j) s.x(i, j) = z(rng);
                const double y = s.x.row(i).dot(th) + p.sigma * z(rng);
                if (keep(rng)) {
                    s.y(i) = y;
                } else {
                    s.x.row(i).setZero();
                    s.y(i) = 0.0;
                }
            }
            break;
        }
        case ScenarioName::scaled_gaussian_rademacher: {
            const RadialLaw law = RadialLaw::from_fourth_moment(p.rho_m4);
            for (Eigen::Index i = 0; i < rows; ++i) {
                const double rho = law.draw(rng);
                for (int j = 0; j < d; ++j) s.x(i, j) = rho * z(rng);
                const double eta = coin(rng) ? 1.0 : -1.0;
                s.y(i) = s.x.row(i).dot(th) + eta * s.x.row(i).norm();
            }
            break;
        }
        case ScenarioName::two_radius_sphere: {
            for (Eigen::Index i = 0; i < rows; ++i) {
                Vector u(d);
                do {
                    for (int j = 0; j < d; ++j) u(j) = z(rng);
                } while (u.norm() == 0.0);
                u.normalize();
                const double rho = coin(rng) ? p.a : p.b;
                const double eta = coin(rng) ? 1.0 : -1.0;
                s.x.row(i) = rho * u.transpose();
                s.y(i) = s.x.row(i).dot(th) + eta / rho;
            }
            break;
        }
        case ScenarioName::histogram_design: {
            std::uniform_real_distribution<double> unif(0.0, 1.0);
            s.x.setZero();
            for (Eigen::Index i = 0; i < rows; ++i) {
                const int k = std::min(d - 1, static_cast<int>(std::floor(unif(rng) * d)));
                s.x(i, k) = 1.0;
                s.y(i) = th(k) + p.sigma * z(rng);
            }
            break;
        }
        case ScenarioName::gaussian_iid: {
            for (Eigen::Index i = 0; i < rows; ++i) {
                for (int j = 0; j < d; ++j) s.x(i, j) = z(rng);
                s.y(i) = s.x.row(i).dot(th) + p.sigma * z(rng);
            }
            break;
        }
    }
    return s;
}

LabeledSample gen_mixture_noise(std::size_t n, std::uint64_t seed) {
    return Scenario::make(ScenarioName::mixture_noise).generate(n, seed);
}

LabeledSample gen_censored_gaussian(std::size_t n, double p, int d, std::uint64_t seed) {
    Scenario s = Scenario::make(ScenarioName::censored_gaussian);
    s.params.p = p;
    s.params.d = d;
    return s.generate(n, seed);
}

LabeledSample gen_scaled_gaussian_rademacher(std::size_t n, int d, const RadialLaw& rho, std::uint64_t seed) {
    require(std::abs(rho.moment(2.0) - 1.0) <= 1e-9, "radius must have unit second moment");
    require(std::abs(RadialLaw::from_fourth_moment(rho.moment(4.0)).hi - rho.hi) <= 1e-9 * rho.hi &&
                std::abs(RadialLaw::from_fourth_moment(rho.moment(4.0)).lo - rho.lo) <= 1e-9,
            "radius must be the two-point law of its fourth moment");
    Scenario s = Scenario::make(ScenarioName::scaled_gaussian_rademacher);
    s.params.d = d;
    s.params.rho_m4 = rho.moment(4.0);
    return s.generate(n, seed);
}

LabeledSample gen_two_radius_sphere(std::size_t n, int d, double a, double b, std::uint64_t seed) {
    Scenario s = Scenario::make(ScenarioName::two_radius_sphere);
    s.params.d = d;
    s.params.a = a;
    s.params.b = b;
    return s.generate(n, seed);
}

Sample gen_histogram_design(std::size_t n, int d, std::uint64_t seed) {
    Scenario s = Scenario::make(ScenarioName::histogram_design);
    s.params.d = d;
    return s.generate(n, seed).design();
}

}  // namespace gramlab

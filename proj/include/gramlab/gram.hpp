#pragma once

#include "gramlab/direction_solver.hpp"
#include "gramlab/types.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace gramlab {

enum class GramMethod { empirical, robust_iter, robust_net };

std::string to_string(GramMethod m);
// Accepts snake_case and kebab-case spellings.
GramMethod parse_gram_method(const std::string& name);

struct GramEstimate {
    Matrix matrix;
    GramMethod method = GramMethod::empirical;
    int rank = 0;
    int iterations_or_net_size = 0;
    // Net method only.
    double constraint_violation = 0.0;
    int qp_sweeps = 0;
    double duality_gap = 0.0;
};

// Energy of a vector of projections, e.g. the robust scale S(p).
using ProjectionEnergy = std::function<double(const Vector&)>;

ProjectionEnergy robust_projection_energy(double eps = kDefaultConfidence, const SolverConfig& cfg = {});
ProjectionEnergy mean_square_energy();

GramEstimate empirical_gram(const Sample& sample);

// Entries 1/4 [N(u_i + u_j) - N(u_i - u_j)] over the basis columns u_i,
// with N(u_i) on the diagonal.
Matrix polarize(const std::function<double(const Vector&)>& energy, const Matrix& basis);

struct IterativeOptions {
    int iters = 5;
    double eps = kDefaultConfidence;
    SolverConfig solver;
    bool positive_part = false;
};

GramEstimate robust_gram_iterative(const Sample& sample, const IterativeOptions& opt = {});

// Same iteration with a caller-supplied projection energy.
GramEstimate robust_gram_iterative(const Sample& sample, const IterativeOptions& opt,
                                   const ProjectionEnergy& energy);

struct SphereNet {
    std::vector<Vector> directions;  // unit vectors in R^d
    double rho = 0.0;
    Matrix basis;                    // d x k orthonormal basis of the span
    double covering_estimate = 0.0;  // largest probed distance to the net
    bool guaranteed = true;          // false for random nets (span dimension > 3)
};

struct NetBuildOptions {
    std::uint64_t seed = 0;
    int random_directions = 2000;  // used when the span dimension exceeds 3
    int probes = 20000;
};

// Orthonormal basis of the span of the sample rows.
Matrix sample_span(const Sample& sample);

SphereNet build_sphere_net(const Sample& sample, double rho, const NetBuildOptions& opt = {});
SphereNet sphere_net_for_basis(const Matrix& basis, double rho, const NetBuildOptions& opt = {});

// Largest distance from random unit probes of the span to their nearest net point.
double covering_radius_estimate(const SphereNet& net, int probes, std::uint64_t seed);

// Net radius making the quadratic-form ratio bound hold off the net.
double net_radius_for_precision(double delta, double lambda_min, double energy_trace);

struct QpOptions {
    double tol = 1e-12;
    int max_sweeps = 100000;
    bool polish = true;
};

struct NetQpResult {
    Matrix matrix;
    Vector xi_plus;
    Vector xi_minus;
    double violation = 0.0;  // largest absolute constraint violation
    double duality_gap = 0.0;
    int sweeps = 0;
    bool converged = false;
};

class NetQpFailure : public NumericalFailure {
public:
    NetQpFailure(const std::string& what, double gap);
    double gap;
};

// Minimum Frobenius norm H with (1-delta) t_k <= u_k' H u_k <= (1+delta) t_k,
// solved through its dual by cyclic coordinate ascent.
NetQpResult solve_net_qp(const std::vector<Vector>& directions, const Vector& targets, double delta,
                         const QpOptions& opt = {});

struct NetOptions {
    double eps = kDefaultConfidence;
    std::optional<double> delta;
    std::optional<double> kappa;   // delta defaults to the certified deviation for this kurtosis
    std::optional<double> lambda;  // fixed scale instead of the adaptive one
    SolverConfig solver;
    QpOptions qp;
};

GramEstimate robust_gram_net(const Sample& sample, const NetOptions& opt, const SphereNet& net);

GramEstimate positive_part(const GramEstimate& g);

// sup_i |mu_i / nu_i - 1| over sorted eigenvalues mu of g2 and nu of g1, with 0/0 = 1.
double eigenvalue_report(const Matrix& g1, const Matrix& g2);
double eigenvalue_report(const GramEstimate& g1, const GramEstimate& g2);

// sup over theta of |theta' g_hat theta / theta' g theta - 1| with 0/0 = 1,
// computed exactly from a generalized eigenproblem; infinite when g_hat acts
// on the kernel of g.
double quadratic_ratio_deviation(const Matrix& g, const Matrix& g_hat);

}  // namespace gramlab

#include "gramlab/linalg.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>

namespace gramlab {

Sample LabeledSample::extended() const {
    Sample out{Matrix(x.rows(), x.cols() + 1)};
    out.x.leftCols(x.cols()) = x;
    out.x.col(x.cols()) = -y;
    return out;
}

void require(bool condition, const std::string& message) {
    if (!condition) throw InvalidInput(message);
}

void require_finite(const Matrix& m, const std::string& what) {
    if (!m.allFinite()) throw InvalidInput(what + " contains non-finite entries");
}

void require_finite(const Vector& v, const std::string& what) {
    if (!v.allFinite()) throw InvalidInput(what + " contains non-finite entries");
}

void validate(const Sample& s) {
    require(s.x.rows() >= 1, "sample must contain at least one row");
    require(s.x.cols() >= 1, "sample must contain at least one column");
    require_finite(s.x, "sample");
}

void validate(const LabeledSample& s) {
    require(s.x.rows() >= 1, "sample must contain at least one row");
    require(s.x.cols() >= 1, "sample must contain at least one column");
    require(s.y.size() == s.x.rows(), "design and response row counts differ");
    require_finite(s.x, "design");
    require_finite(s.y, "response");
}

SymmetricEigen symmetric_eigen(const Matrix& m) {
    if (!m.allFinite()) throw NumericalFailure("eigendecomposition of a non-finite matrix");
    Eigen::SelfAdjointEigenSolver<Matrix> solver(symmetrize(m));
    if (solver.info() != Eigen::Success) throw NumericalFailure("eigendecomposition did not converge");
    return {solver.eigenvalues(), solver.eigenvectors()};
}

double rank_cutoff(const Vector& eigenvalues) {
    if (eigenvalues.size() == 0) return 0.0;
    return kRankThreshold * std::max(0.0, eigenvalues.maxCoeff());
}

int numerical_rank(const Matrix& m) {
    if (m.size() == 0) return 0;
    const auto eig = symmetric_eigen(m);
    const double cut = rank_cutoff(eig.values);
    int rank = 0;
    for (Eigen::Index i = 0; i < eig.values.size(); ++i) {
        if (eig.values(i) > cut) ++rank;
    }
    return rank;
}

namespace {

template <class F>
Matrix spectral_map(const Matrix& m, F f) {
    const auto eig = symmetric_eigen(m);
    const double cut = rank_cutoff(eig.values);
    Vector mapped(eig.values.size());
    for (Eigen::Index i = 0; i < eig.values.size(); ++i) {
        const double v = eig.values(i);
        mapped(i) = (v > cut) ? f(v) : 0.0;
    }
    return eig.vectors * mapped.asDiagonal() * eig.vectors.transpose();
}

}  // namespace

Matrix pseudo_inverse(const Matrix& m) {
    if (m.size() == 0) return m;
    return spectral_map(m, [](double v) { return 1.0 / v; });
}

Matrix pseudo_inverse_sqrt(const Matrix& m) {
    if (m.size() == 0) return m;
    return spectral_map(m, [](double v) { return 1.0 / std::sqrt(v); });
}

Matrix symmetrize(const Matrix& m) { return 0.5 * (m + m.transpose()); }

}  // namespace gramlab

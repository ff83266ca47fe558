#pragma once

#include "gramlab/types.hpp"

namespace gramlab {

// Eigenvalues below this fraction of the largest one count as zero.
inline constexpr double kRankThreshold = 1e-10;

struct SymmetricEigen {
    Vector values;   // ascending
    Matrix vectors;  // columns
};

SymmetricEigen symmetric_eigen(const Matrix& m);

// Cutoff below which an eigenvalue of m is treated as zero.
double rank_cutoff(const Vector& eigenvalues);

int numerical_rank(const Matrix& m);

Matrix pseudo_inverse(const Matrix& m);

// Moore-Penrose inverse square root restricted to the image of a PSD matrix.
Matrix pseudo_inverse_sqrt(const Matrix& m);

Matrix symmetrize(const Matrix& m);

}  // namespace gramlab

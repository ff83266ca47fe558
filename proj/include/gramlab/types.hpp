#pragma once

#include <Eigen/Core>

#include <cstddef>
#include <stdexcept>
#include <string>

namespace gramlab {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Rows are observations.
struct Sample {
    Matrix x;

    std::size_t n() const { return static_cast<std::size_t>(x.rows()); }
    std::size_t d() const { return static_cast<std::size_t>(x.cols()); }
};

struct LabeledSample {
    Matrix x;
    Vector y;

    std::size_t n() const { return static_cast<std::size_t>(x.rows()); }
    std::size_t d() const { return static_cast<std::size_t>(x.cols()); }

    // Rows (x_i, -y_i).
    Sample extended() const;
    Sample design() const { return Sample{x}; }
};

class InvalidInput : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class NumericalFailure : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

void require(bool condition, const std::string& message);
void require_finite(const Matrix& m, const std::string& what);
void require_finite(const Vector& v, const std::string& what);
void validate(const Sample& s);
void validate(const LabeledSample& s);

}  // namespace gramlab

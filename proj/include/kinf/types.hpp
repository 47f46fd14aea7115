#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace kinf {

using Complex = std::complex<double>;
using Vector = Eigen::VectorXcd;
using Matrix = Eigen::MatrixXcd;
using RealVector = Eigen::VectorXd;
using RealMatrix = Eigen::MatrixXd;

enum class ErrorKind {
    InvalidArgument,
    SpaceMismatch,
    NotBisectable,
    EmptyBand,
    ToleranceUnreachable,
    QuadratureInsufficient,
    NearSingular,
    AlphaNotZero,
    DegenerateSystem,
};

const char* to_string(ErrorKind kind) noexcept;

// Every failure the library reports. `value` carries the numeric payload of
// the failure where there is one: the best achieved decay for
// ToleranceUnreachable, the band index for EmptyBand, the condition estimate
// for NearSingular, the Gram defect for QuadratureInsufficient.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what, double value = 0.0)
        : std::runtime_error(what), kind_(kind), value_(value) {}

    ErrorKind kind() const noexcept { return kind_; }
    double value() const noexcept { return value_; }

private:
    ErrorKind kind_;
    double value_;
};

}  // namespace kinf

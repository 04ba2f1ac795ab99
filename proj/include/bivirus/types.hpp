#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>

namespace bivirus {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class GraphError : public Error {
public:
    using Error::Error;
};

class RateError : public Error {
public:
    using Error::Error;
};

/// A state fell outside the admissible region by more than the allowed slack.
class DomainError : public Error {
public:
    using Error::Error;
};

}  // namespace bivirus

#pragma once

#include <Eigen/Dense>

#include <complex>
#include <stdexcept>
#include <string>

namespace feedcap {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;
using RowVec = Eigen::RowVectorXd;
using Cplx = std::complex<double>;

// Relative tolerance for classifying |lambda| against the unit circle.
inline constexpr double kCircleTol = 1e-9;

// Residual tolerance factor for the Sylvester solver.
inline constexpr double kSylvesterTol = 1e-10;

// Error hierarchy.  The CLI maps ValidationError to exit code 2 and
// NumericalError (and derived) to exit code 3.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

class DimensionError : public Error {
 public:
  explicit DimensionError(const std::string& msg) : Error(msg) {}
};

class ValidationError : public Error {
 public:
  explicit ValidationError(const std::string& msg) : Error(msg) {}
};

class NumericalError : public Error {
 public:
  explicit NumericalError(const std::string& msg) : Error(msg) {}
};

class ConvergenceError : public NumericalError {
 public:
  explicit ConvergenceError(const std::string& msg) : NumericalError(msg) {}
};

class SingularEquationError : public NumericalError {
 public:
  explicit SingularEquationError(const std::string& msg) : NumericalError(msg) {}
};

class HorizonError : public Error {
 public:
  explicit HorizonError(const std::string& msg) : Error(msg) {}
};

}  // namespace feedcap

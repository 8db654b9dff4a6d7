#pragma once

#include <Eigen/Core>

#include <stdexcept>
#include <string>

namespace ubn {

/// Small dense vector/matrix types sized for d <= 3 without heap allocation.
using Vec = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, 3, 1>;
/// One entry per simplex vertex (up to 4).
using VertexVec = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, 4, 1>;
using Mat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, 3, 3>;

/// Fourth-order tensor A_{iJkL} stored as a (d*d) x (d*d) matrix with
/// row index i*d + J and column index k*d + L.
using Tangent = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, 9, 9>;

class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ArgumentError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class ClassificationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Energy evaluated where ln J is undefined.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// det(F) == 0 on some element; carries the element index when known.
class SingularConfigurationError : public std::runtime_error {
 public:
  SingularConfigurationError(const std::string& what, int element = -1)
      : std::runtime_error(what), element_(element) {}
  int element() const { return element_; }

 private:
  int element_;
};

/// Non-positive pivot in the SPD factorization.
class IndefiniteSystemError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace ubn

#pragma once

#include <stdexcept>
#include <string>

namespace qes {

/// Parameter outside the physical or mathematical domain of an operation.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// s^2 + 2 theta m_r < 0: the inverse-square term makes the particle fall
/// to the centre and no regular ansatz exists.
class FallToCentreError : public DomainError {
 public:
  using DomainError::DomainError;
};

/// Ansatz denominator vanishes (Family III: l3 m_r + tau (d+1) = 0).
class DegenerateParameterError : public DomainError {
 public:
  using DomainError::DomainError;
};

/// Coupling case does not match the particle pair (e_c != 0 or q != 0).
class AdmissibilityError : public DomainError {
 public:
  using DomainError::DomainError;
};

/// Eigen-solver or eigenvector failure.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace qes

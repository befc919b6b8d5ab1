#pragma once

// Two charges on a plane in a uniform field: centre-of-mass constants, the
// three potential families, ansatz exponents, and the finite block of the
// gauge-rotated radial operator on polynomials of degree <= d.

#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "qes/dense_matrix.hpp"
#include "qes/errors.hpp"
#include "qes/sl2_rep.hpp"

namespace qes {

struct ParticlePair {
  double m1 = 1.0;
  double m2 = 1.0;
  double e1 = 0.0;
  double e2 = 0.0;
  double B = 0.0;
};

struct DerivedConstants {
  double e1 = 0.0;
  double e2 = 0.0;
  double B = 0.0;
  double M = 0.0;        // total mass
  double m_r = 0.0;      // reduced mass
  double mu1 = 0.0;      // m1 / M
  double mu2 = 0.0;      // m2 / M
  double q = 0.0;        // total charge
  double e_c = 0.0;      // coupling charge mu2 e1 - mu1 e2
  double q_W = 0.0;      // e1 mu2^2 + e2 mu1^2
  double omega_c = 0.0;  // q B / M
  double Omega_q = 0.0;  // e1 B / (2 m_r)
  double omega_q = 0.0;  // e1 B |mu2 - mu1| / m_r
};

DerivedConstants derive_constants(const ParticlePair& pair);

enum class CaseTag { ChargedEc0, NeutralRest };

std::string_view to_string(CaseTag tag);
CaseTag parse_case_tag(std::string_view name);

/// Coefficients of the unified radial operator
///   -(1/2m_r)(d^2 + r^-1 d) + s^2/(2 m_r r^2) - s lambda_rot/2 + lambda_conf r^2 + V.
struct CouplingCase {
  CaseTag tag = CaseTag::ChargedEc0;
  double lambda_rot = 0.0;
  double lambda_conf = 0.0;
};

/// Throws AdmissibilityError when e_c != 0 (charged) or q != 0 (neutral),
/// relative to tol * max(|e1|, |e2|).
CouplingCase effective_radial_problem(const DerivedConstants& consts, CaseTag tag,
                                      double tol = 1e-12);

// The quantised "field" is the case frequency f (omega_c for the charged
// case, Omega_q for the neutral one). lambda_rot = rot * f and
// lambda_conf = conf * f^2.
struct FieldScaling {
  double rot = 1.0;
  double conf = 0.0;
};
FieldScaling field_scaling(CaseTag tag, const DerivedConstants& consts);
CouplingCase coupling_at_frequency(CaseTag tag, const DerivedConstants& consts, double f);
double case_frequency(CaseTag tag, const DerivedConstants& consts);
std::string_view frequency_name(CaseTag tag);

// ---------------------------------------------------------------------------
// Potentials

enum class Family { I, II, III };

std::string_view to_string(Family f);
Family parse_family(std::string_view name);

/// g_c/r + theta/r^2 + k1 r + k2 r^2
struct FamilyI {
  double g_c = 0.0;
  double theta = 0.0;
  double k1 = 0.0;
  double k2 = 0.0;
};

/// theta/r^2 + k2 r^2 + k4 r^4 + k6 r^6
struct FamilyII {
  double theta = 0.0;
  double k2 = 0.0;
  double k4 = 0.0;
  double k6 = 0.0;
};

/// l4/r^4 + l3/r^3 + l2/r^2 + l1/r - k2 r^2
struct FamilyIII {
  double l1 = 0.0;
  double l2 = 0.0;
  double l3 = 0.0;
  double l4 = 0.0;
  double k2 = 0.0;
};

using PotentialSpec = std::variant<FamilyI, FamilyII, FamilyIII>;

Family family_of(const PotentialSpec& pot);

/// 2 m_r g_c
double coulomb_epsilon(const FamilyI& pot, const DerivedConstants& consts);

// ---------------------------------------------------------------------------
// Ansatz

struct AnsatzParams {
  Family family = Family::I;
  int d = 0;
  int s = 0;
  double tau = 0.0;
  double eta = 0.0;
  double xi = 0.0;
  double alpha = 0.0;
  double beta = 0.0;
  double gamma = 0.0;  // Family III only
  double c = 1.0;      // variable scaling u = c r (or u = c r^2)
  bool normalizable = false;
  bool real_xi = true;
};

/// Ansatz exponents for the given family, coupling and (s, d).
/// Throws FallToCentreError, DomainError, DegenerateParameterError.
AnsatzParams ansatz_params(const PotentialSpec& pot, const CouplingCase& coupling,
                           const DerivedConstants& consts, int s, int d);

// ---------------------------------------------------------------------------
// Canonical operator and its block

enum class VariableMap { Identity, SquareMap };

template <class T>
struct CanonicalCoefficients {
  Family family = Family::I;
  int d = 0;
  T beta{0};
  T xi{0};
  T gamma{0};
  T alpha{0};
};

CanonicalCoefficients<double> canonical_coefficients(const AnsatzParams& ansatz);

/// Family I : -u d^2 + (u^2 + beta u - (1 + 2 xi)) d - d u
/// Family II: -u d^2 + (u^2 + beta u - (1 + xi)) d - d u      (u = c r^2)
/// Family III: -r^2 d^2 + (2 gamma r^2 + (beta + d - 2) r - 2 alpha) d - 2 gamma d r
template <class T>
DiffOperator<T> canonical_operator(const CanonicalCoefficients<T>& k);

/// Closed-form monomial action of canonical_operator; tridiagonal.
template <class T>
DenseMatrix<T> canonical_block_matrix(const CanonicalCoefficients<T>& k);

struct QESBlock {
  DenseMatrix<double> matrix;
  double scaling_c = 1.0;
  VariableMap variable_map = VariableMap::Identity;
  Family family = Family::I;
  AnsatzParams ansatz;
};

QESBlock qes_block(const AnsatzParams& ansatz);

template <class T>
struct InvarianceCertificate {
  bool invariant = true;
  int degree = 0;
  /// Coefficient of r^{k+1} in op(r^k), k = 0..d. Entry d must vanish.
  std::vector<T> top_coefficients;
  int offending_k = -1;
  int offending_power = 0;
  T offending_coefficient{0};
};

/// Exact check that op maps every r^k, k <= d, into span{1, ..., r^d}.
template <class T>
InvarianceCertificate<T> check_invariance(const DiffOperator<T>& op, int d);

InvarianceCertificate<double> invariance_check(const AnsatzParams& ansatz);

}  // namespace qes

#include "qes/qes_core_impl.hpp"

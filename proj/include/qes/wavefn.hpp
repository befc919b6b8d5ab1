#pragma once

// Physical radial wavefunctions zeta(r) = exp(phi(r)) r^xi p(r) rebuilt from
// block eigenvectors.

#include <optional>
#include <vector>

#include "qes/qes_core.hpp"
#include "qes/spectra.hpp"

namespace qes {

struct RadialWavefunction {
  Family family = Family::I;
  AnsatzParams ansatz;
  /// Coefficients of p in the physical variable r (ascending powers).
  /// Family II: degree 2d, even powers only.
  std::vector<double> poly;
  std::optional<double> norm;
};

/// Eigenvector coefficients in the scaled variable mapped to r, with the
/// leading coefficient set to 1. Throws DomainError for complex branches.
std::vector<double> polynomial_from_eigenvector(const QESBlock& block, const BranchEigen& branch);

/// Inverse of the unscaling in polynomial_from_eigenvector (no renormalisation).
std::vector<double> to_scaled_coefficients(const QESBlock& block, const std::vector<double>& physical);

RadialWavefunction make_wavefunction(const QESBlock& block, const BranchEigen& branch);

/// exponent phi(r) = sum coef r^power; the r^xi factor is separate.
struct ExponentTerm {
  double coef = 0.0;
  int power = 0;
};
std::vector<ExponentTerm> exponent_terms(const AnsatzParams& ansatz);

struct ZetaValue {
  double value = 0.0;   // sign * exp(log_abs); 0 or inf when not representable
  int sign = 0;         // -1, 0, +1
  double log_abs = 0.0; // log|zeta|, -inf at a node
  bool representable = true;
};

/// Throws DomainError for rho <= 0.
ZetaValue evaluate_zeta(const RadialWavefunction& wf, double rho);

struct QuadratureConfig {
  double rel_tol = 1e-10;
};

/// Sets wf.norm = sqrt(int_0^inf zeta^2 r dr). Throws DomainError when the
/// ansatz is not normalisable.
RadialWavefunction normalize(RadialWavefunction wf, const QuadratureConfig& config = {});

/// Distinct real roots of poly on (0, inf), by Sturm sequence.
int count_positive_roots(const std::vector<double>& poly);

/// Sign changes of p on (0, inf); Family II counts in w = r^2.
int count_nodes(const RadialWavefunction& wf);

/// Horner evaluation of p, p', p'' at x.
struct PolyJet {
  double p = 0.0;
  double dp = 0.0;
  double d2p = 0.0;
};
PolyJet evaluate_poly_jet(const std::vector<double>& poly, double x);

}  // namespace qes

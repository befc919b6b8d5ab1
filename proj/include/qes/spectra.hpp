#pragma once

// Block eigenvalues, the per-family quantisation constraints and the
// relative-motion energy of each solvable level.

#include <complex>
#include <optional>
#include <string>
#include <vector>

#include "qes/qes_core.hpp"

namespace qes {

/// Which closed forms to use where the printed formulas and coefficient
/// matching disagree. PaperPrinted exists for arbitration runs only.
enum class FormulaSet { Derived, PaperPrinted };

struct BranchEigen {
  std::complex<double> mu;
  /// beta d/2 - mu for Families I and II, beta d/2 - d - mu for Family III.
  double nu = 0.0;
  int branch_index = 0;
  bool is_real = true;
};

/// |Im mu| <= 1e-10 (1 + |mu|)
bool is_real_eigenvalue(std::complex<double> mu);

/// All d+1 eigenvalues ordered by real part, then imaginary part.
std::vector<BranchEigen> block_eigenvalues(const QESBlock& block);

/// Right / left eigenvector for one branch, largest component scaled to 1.
std::vector<std::complex<double>> right_eigenvector(const QESBlock& block, const BranchEigen& branch);
std::vector<std::complex<double>> left_eigenvector(const QESBlock& block, const BranchEigen& branch);

// ---------------------------------------------------------------------------
// Family I: field quantisation by root finding

/// eps + eta (1 + 2 xi) + c mu_branch(f). Zero when the level is algebraic.
double quantization_residual_I(double f, const FamilyI& pot, const DerivedConstants& consts,
                               CaseTag tag, int s, int d, int branch);

struct FieldSolveOptions {
  int scan_points = 512;
  double f_lo = 1e-6;
  double f_hi = 1e6;
  double rel_tol = 1e-12;
};

struct FieldRoot {
  double frequency = 0.0;
  int branch = 0;
};

struct FieldSolution {
  std::vector<FieldRoot> roots;
  /// Branches whose residual vanishes identically in f.
  std::vector<int> degenerate_branches;
  std::vector<std::string> warnings;
};

FieldSolution solve_quantized_field_I(const FamilyI& pot, const DerivedConstants& consts,
                                      CaseTag tag, int s, int d,
                                      const FieldSolveOptions& options = {});

// ---------------------------------------------------------------------------
// Family II: closed-form field

/// Positive case frequency satisfying the quantisation condition, if any.
std::optional<double> solve_quantized_field_II(const FamilyII& pot, const DerivedConstants& consts,
                                               CaseTag tag, int s, int d,
                                               FormulaSet formulas = FormulaSet::Derived);

// ---------------------------------------------------------------------------
// Family III: fixed field, quantised l2

struct ConstraintsIII {
  double frequency = 0.0;
  double l2 = 0.0;
  BranchEigen branch;
};

/// Throws DomainError if k2 <= 0 (no admissible field).
ConstraintsIII solve_constraints_III(const FamilyIII& pot, const DerivedConstants& consts,
                                     CaseTag tag, int s, int d, int branch,
                                     FormulaSet formulas = FormulaSet::Derived);

// ---------------------------------------------------------------------------

/// Energy of relative motion for a real block eigenvalue mu.
double relative_energy(const AnsatzParams& ansatz, const CouplingCase& coupling,
                       const DerivedConstants& consts, double mu,
                       FormulaSet formulas = FormulaSet::Derived);

/// As above; throws DomainError for a complex branch.
double relative_energy(const AnsatzParams& ansatz, const CouplingCase& coupling,
                       const DerivedConstants& consts, const BranchEigen& branch,
                       FormulaSet formulas = FormulaSet::Derived);

}  // namespace qes

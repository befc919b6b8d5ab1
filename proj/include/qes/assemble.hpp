#pragma once

// Batch assembly of solvable levels over (d, s) cells.

#include <string>
#include <vector>

#include "qes/oracle.hpp"
#include "qes/qes_core.hpp"
#include "qes/spectra.hpp"
#include "qes/wavefn.hpp"

namespace qes {

/// Field: quantise the case frequency (Families I and II).
/// PotentialParam: keep the field fixed by k2 and solve for l2 (Family III).
enum class SolveFor { Field, PotentialParam };

std::string_view to_string(SolveFor s);

struct SpectrumRequest {
  ParticlePair pair;
  CaseTag case_tag = CaseTag::ChargedEc0;
  PotentialSpec potential = FamilyI{};
  std::vector<int> d_list{0};
  std::vector<int> s_list{0};
  SolveFor solve_for = SolveFor::Field;
  FormulaSet formulas = FormulaSet::Derived;
  int jobs = 1;
  FieldSolveOptions field_options;
};

struct SpectrumLine {
  Family family = Family::I;
  CaseTag case_tag = CaseTag::ChargedEc0;
  int d = 0;
  int s = 0;
  int branch = 0;
  std::string quantized_name;  // omega_c | Omega_q | l2
  double quantized_value = 0.0;
  double field = 0.0;  // case frequency at which the line is realised
  double E_rho = 0.0;
  double nu = 0.0;
  double mu = 0.0;  // real part for complex branches
  bool real_branch = true;
  bool normalizable = true;
  int nodes = 0;
  std::vector<double> poly;

  bool operator==(const SpectrumLine&) const = default;
};

struct LineFailure {
  int d = 0;
  int s = 0;
  int branch = -1;  // -1: the whole cell failed
  std::string message;
};

struct SpectrumResult {
  std::vector<SpectrumLine> lines;  // ascending E_rho, ties by (d, s, branch)
  std::vector<LineFailure> failures;
  std::vector<std::string> warnings;
};

/// Throws AdmissibilityError / DomainError for an inconsistent request;
/// per-cell numerical or domain problems land in `failures`.
SpectrumResult assemble_spectrum(const SpectrumRequest& request);

/// Deterministic report order: family, d, s, branch, then field.
void sort_for_output(std::vector<SpectrumLine>& lines);

// ---------------------------------------------------------------------------
// Re-deriving the physics of a line

struct LineContext {
  DerivedConstants consts;
  CouplingCase coupling;
  PotentialSpec potential;  // with the solved l2 for Family III
  AnsatzParams ansatz;
};

LineContext line_context(const SpectrumRequest& request, const SpectrumLine& line);
RadialWavefunction line_wavefunction(const SpectrumRequest& request, const SpectrumLine& line);
RadialProblem line_problem(const SpectrumRequest& request, const SpectrumLine& line);

/// Residual of the quantisation condition at the line's parameters, relative
/// to the magnitude of its terms (Family I: absolute residual).
double line_quantization_residual(const SpectrumRequest& request, const SpectrumLine& line);

OracleReport cross_validate_line(const SpectrumRequest& request, const SpectrumLine& line,
                                 const OracleOptions& options = {});

}  // namespace qes

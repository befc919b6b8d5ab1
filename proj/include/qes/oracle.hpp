#pragma once

// Finite-difference reference solver for the separated radial equation
//   -(1/2m)(z'' + z'/r) + [s^2/(2m r^2) + lambda_conf r^2 + V(r)] z = (E + s lambda_rot/2) z.
// It only sees V(r) as a function and shares no code with the algebraic path.

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qes/qes_core.hpp"
#include "qes/wavefn.hpp"

namespace qes {

enum class Spacing { Uniform, LogUniform };

struct RadialGrid {
  double rho_min = 1e-3;
  double rho_max = 10.0;
  int points = 2000;
  Spacing spacing = Spacing::LogUniform;
};

struct RadialProblem {
  std::function<double(double)> potential;
  int s = 0;
  double m_r = 1.0;
  double lambda_rot = 0.0;
  double lambda_conf = 0.0;
};

/// V(r) for a potential family, evaluated directly from its definition.
std::function<double(double)> make_potential(const PotentialSpec& pot);

/// Generalised symmetric tridiagonal problem A z = lambda W z with W diagonal
/// and positive; E = lambda - energy_shift.
struct TridiagonalPencil {
  std::vector<double> diag;
  std::vector<double> off;
  std::vector<double> weight;
  std::vector<double> nodes;
  double energy_shift = 0.0;

  std::size_t size() const { return diag.size(); }
};

/// Uniform: u = sqrt(r) z, central differences, Dirichlet at both ends.
/// LogUniform: x = ln r, cell-centred flux form; the inner face uses an
/// exponentially fitted condition exact for z ~ r^kappa (kappa < 1),
/// Dirichlet at the outer face.
TridiagonalPencil discretize(const RadialProblem& problem, const RadialGrid& grid);

/// Number of eigenvalues (in energy units) strictly below E.
int count_below(const TridiagonalPencil& pencil, double energy);

/// Eigenvalue with the given 0-based index, by Sturm bisection.
double oracle_eigenvalue(const TridiagonalPencil& pencil, int index);

/// The k lowest energies, ascending. Requires k <= size/4.
std::vector<double> oracle_eigenvalues(const TridiagonalPencil& pencil, int k);

/// max |L z - E z| / (max |z| * max(|E|, energy_floor)) over samples, with
/// z', z'' taken analytically from the ansatz-times-polynomial form.
double ode_residual(const RadialWavefunction& wf, const RadialProblem& problem, double energy,
                    std::span<const double> samples, double energy_floor = 1.0);

/// 1000 log-spaced points covering the region where |z| is within e^-50 of
/// its peak (lower end clipped at 1e-3 of the peak position).
std::vector<double> default_residual_samples(const RadialWavefunction& wf, int count = 1000);

struct OracleOptions {
  int base_points = 2000;
  Spacing spacing = Spacing::LogUniform;
  std::optional<double> rho_min;
  std::optional<double> rho_max;
  double gap_tol = 1e-4;
  double residual_tol = 1e-8;
  double energy_floor = 1.0;
};

struct GridConvergence {
  std::vector<double> raw;  // h, h/2, h/4
  double order = 0.0;
  double extrapolated = 0.0;
};

struct OracleMatch {
  int level_index = 0;
  double oracle_energy = 0.0;   // finest grid
  double raw_gap = 0.0;         // |E_finest - E|
  double extrapolated_gap = 0.0;
  double relative_gap = 0.0;    // extrapolated gap / max(|E|, level spacing)
};

struct OracleReport {
  std::vector<double> energies;
  std::optional<OracleMatch> matched;
  double residual_max = 0.0;
  GridConvergence grid_convergence;
  RadialGrid grid;
  bool passed = false;
  std::string message;
};

/// Domain chosen from the classically allowed region at the claimed energy:
/// rho_max = 6 x outer turning point; rho_min where the WKB decay exponent
/// inward of the inner turning point reaches 40 (never below 1e-8 rho_max/6).
RadialGrid default_grid(const RadialProblem& problem, double energy, const OracleOptions& options);

/// Three-grid ladder, Richardson extrapolation, nearest-level match and ODE
/// residual of the claimed wavefunction.
OracleReport cross_validate(double energy, const RadialProblem& problem,
                            const RadialWavefunction& wf, const OracleOptions& options = {});

}  // namespace qes

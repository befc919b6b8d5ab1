#include "qes/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace qes {

std::function<double(double)> make_potential(const PotentialSpec& pot) {
  struct Visitor {
    std::function<double(double)> operator()(const FamilyI& p) const {
      return [p](double r) { return p.g_c / r + p.theta / (r * r) + p.k1 * r + p.k2 * r * r; };
    }
    std::function<double(double)> operator()(const FamilyII& p) const {
      return [p](double r) {
        const double r2 = r * r;
        return p.theta / r2 + r2 * (p.k2 + r2 * (p.k4 + r2 * p.k6));
      };
    }
    std::function<double(double)> operator()(const FamilyIII& p) const {
      return [p](double r) {
        const double x = 1.0 / r;
        return x * (p.l1 + x * (p.l2 + x * (p.l3 + x * p.l4))) - p.k2 * r * r;
      };
    }
  };
  return std::visit(Visitor{}, pot);
}

namespace {

void check_grid(const RadialGrid& g) {
  if (!(g.rho_min > 0.0) || !(g.rho_max > g.rho_min))
    throw DomainError("oracle grid: need 0 < rho_min < rho_max");
  if (g.points < 8) throw DomainError("oracle grid: need at least 8 points");
}

/// s^2/(2m) + r^2 (lambda_conf r^2 + V): the x = ln r form of the potential.
double q_term(const RadialProblem& p, double r) {
  return static_cast<double>(p.s) * p.s / (2.0 * p.m_r) + r * r * (p.lambda_conf * r * r + p.potential(r));
}

}  // namespace

TridiagonalPencil discretize(const RadialProblem& problem, const RadialGrid& grid) {
  check_grid(grid);
  const int n = grid.points;
  const double m = problem.m_r;
  TridiagonalPencil pen;
  pen.energy_shift = 0.5 * problem.s * problem.lambda_rot;
  pen.diag.resize(static_cast<std::size_t>(n));
  pen.off.assign(static_cast<std::size_t>(n - 1), 0.0);
  pen.weight.resize(static_cast<std::size_t>(n));
  pen.nodes.resize(static_cast<std::size_t>(n));

  if (grid.spacing == Spacing::Uniform) {
    const double h = (grid.rho_max - grid.rho_min) / (n + 1);
    const double t = 1.0 / (2.0 * m * h * h);
    const double cent = (static_cast<double>(problem.s) * problem.s - 0.25) / (2.0 * m);
    for (int i = 0; i < n; ++i) {
      const double r = grid.rho_min + (i + 1) * h;
      const auto k = static_cast<std::size_t>(i);
      pen.nodes[k] = r;
      pen.weight[k] = 1.0;
      pen.diag[k] = 2.0 * t + cent / (r * r) + problem.lambda_conf * r * r + problem.potential(r);
      if (i + 1 < n) pen.off[k] = -t;
    }
    return pen;
  }

  const double x0 = std::log(grid.rho_min);
  const double h = (std::log(grid.rho_max) - x0) / n;
  const double t = 1.0 / (2.0 * m * h * h);

  // Power law z ~ r^kappa at the inner face. kappa^2 / 2m is the r -> 0
  // limit of q_term, extrapolated linearly from two points so that a 1/r
  // term in V does not leak into it.
  const double r0 = std::exp(x0 + 0.5 * h);
  const double q_lim = 2.0 * q_term(problem, 0.5 * r0) - q_term(problem, r0);
  double kappa = std::sqrt(std::max(0.0, 2.0 * m * q_lim));
  if (!(kappa < 1.0)) kappa = 0.0;
  const double fit = kappa * kappa / (2.0 * m);
  const double interior = 2.0 * t * std::cosh(kappa * h) - fit;

  for (int i = 0; i < n; ++i) {
    const double r = std::exp(x0 + (i + 0.5) * h);
    const auto k = static_cast<std::size_t>(i);
    pen.nodes[k] = r;
    pen.weight[k] = r * r;
    pen.diag[k] = interior + q_term(problem, r);
    if (i + 1 < n) pen.off[k] = -t;
  }
  pen.diag.front() += t * std::exp(kappa * h) - 2.0 * t * std::cosh(kappa * h);
  pen.diag.back() += t;
  return pen;
}

namespace {

int count_below_lambda(const TridiagonalPencil& pen, double lambda) {
  int neg = 0;
  double prev = 1.0;
  const double tiny = std::numeric_limits<double>::min() * 1e10;
  for (std::size_t i = 0; i < pen.size(); ++i) {
    double d = pen.diag[i] - lambda * pen.weight[i];
    if (i > 0) d -= pen.off[i - 1] * pen.off[i - 1] / prev;
    if (d == 0.0) d = -tiny;
    if (d < 0.0) ++neg;
    prev = d;
  }
  return neg;
}

}  // namespace

int count_below(const TridiagonalPencil& pencil, double energy) {
  return count_below_lambda(pencil, energy + pencil.energy_shift);
}

double oracle_eigenvalue(const TridiagonalPencil& pen, int index) {
  if (index < 0 || static_cast<std::size_t>(index) >= pen.size())
    throw std::out_of_range("oracle_eigenvalue: index out of range");
  double lo = -1.0;
  double hi = 1.0;
  for (int i = 0; i < 2100 && count_below_lambda(pen, lo) > index; ++i) lo *= 2.0;
  for (int i = 0; i < 2100 && count_below_lambda(pen, hi) <= index; ++i) hi *= 2.0;
  if (!std::isfinite(lo) || !std::isfinite(hi)) throw NumericalError("oracle_eigenvalue: no bracket");

  for (int it = 0; it < 400; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (hi - lo <= 1e-15 * std::max(std::abs(lo), std::abs(hi)) + 1e-300) break;
    if (count_below_lambda(pen, mid) > index)
      hi = mid;
    else
      lo = mid;
  }
  return 0.5 * (lo + hi) - pen.energy_shift;
}

std::vector<double> oracle_eigenvalues(const TridiagonalPencil& pen, int k) {
  if (k < 0 || static_cast<std::size_t>(4 * k) > pen.size())
    throw std::out_of_range("oracle_eigenvalues: k must satisfy 0 <= k <= size/4");
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) out.push_back(oracle_eigenvalue(pen, i));
  return out;
}

// ---------------------------------------------------------------------------

namespace {

struct ExponentJet {
  double log_w = 0.0;  // phi + xi ln r
  double g = 0.0;      // (log_w)'
  double dg = 0.0;     // (log_w)''
};

ExponentJet exponent_jet(const RadialWavefunction& wf, double r) {
  ExponentJet j;
  const double xi = wf.ansatz.xi;
  j.log_w = xi * std::log(r);
  j.g = xi / r;
  j.dg = -xi / (r * r);
  for (const auto& t : exponent_terms(wf.ansatz)) {
    const double p = t.power;
    const double rp = std::pow(r, p);
    j.log_w += t.coef * rp;
    j.g += t.coef * p * rp / r;
    j.dg += t.coef * p * (p - 1.0) * rp / (r * r);
  }
  return j;
}

double log_abs_zeta(const RadialWavefunction& wf, double r) {
  const double p = evaluate_poly_jet(wf.poly, r).p;
  if (p == 0.0) return -std::numeric_limits<double>::infinity();
  return exponent_jet(wf, r).log_w + std::log(std::abs(p));
}

}  // namespace

double ode_residual(const RadialWavefunction& wf, const RadialProblem& problem, double energy,
                    std::span<const double> samples, double energy_floor) {
  if (samples.empty()) return 0.0;
  const double m = problem.m_r;
  const double s2 = static_cast<double>(problem.s) * problem.s;
  const double rot = 0.5 * problem.s * problem.lambda_rot;

  std::vector<double> logs;
  std::vector<double> brackets;
  double lmax = -std::numeric_limits<double>::infinity();
  for (double r : samples) {
    if (!(r > 0.0)) throw DomainError("ode_residual: sample points must be positive");
    const ExponentJet e = exponent_jet(wf, r);
    const PolyJet p = evaluate_poly_jet(wf.poly, r);
    const double zp = p.dp + e.g * p.p;
    const double zpp = p.d2p + 2.0 * e.g * p.dp + (e.dg + e.g * e.g) * p.p;
    const double u = s2 / (2.0 * m * r * r) - rot + problem.lambda_conf * r * r + problem.potential(r);
    const double bracket = -(zpp + zp / r) / (2.0 * m) + (u - energy) * p.p;
    logs.push_back(e.log_w);
    brackets.push_back(bracket);
    if (p.p != 0.0) lmax = std::max(lmax, e.log_w + std::log(std::abs(p.p)));
  }
  if (!std::isfinite(lmax)) return 0.0;

  double worst = 0.0;
  for (std::size_t i = 0; i < logs.size(); ++i) {
    const double scaled = std::exp(logs[i] - lmax) * std::abs(brackets[i]);
    if (std::isnan(scaled)) return std::numeric_limits<double>::infinity();
    worst = std::max(worst, scaled);
  }
  return worst / std::max(std::abs(energy), energy_floor);
}

std::vector<double> default_residual_samples(const RadialWavefunction& wf, int count) {
  constexpr int kScan = 3200;
  std::vector<double> rs;
  std::vector<double> ls;
  double peak_log = -std::numeric_limits<double>::infinity();
  double peak_r = 1.0;
  for (int i = 0; i <= kScan; ++i) {
    const double r = std::pow(10.0, -8.0 + 16.0 * i / kScan);
    const double l = log_abs_zeta(wf, r);
    rs.push_back(r);
    ls.push_back(l);
    if (l > peak_log) {
      peak_log = l;
      peak_r = r;
    }
  }
  double lo = 1e-3 * peak_r;
  double hi = peak_r;
  for (std::size_t i = 0; i < rs.size(); ++i) {
    if (ls[i] < peak_log - 50.0) continue;
    if (rs[i] > peak_r) hi = std::max(hi, rs[i]);
    if (rs[i] < peak_r && rs[i] > lo && (i == 0 || ls[i - 1] < peak_log - 50.0)) lo = std::max(lo, rs[i]);
  }
  if (!(hi > lo)) hi = 10.0 * lo;

  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(count));
  const double step = count > 1 ? std::log(hi / lo) / (count - 1) : 0.0;
  for (int i = 0; i < count; ++i) out.push_back(lo * std::exp(step * i));
  return out;
}

// ---------------------------------------------------------------------------

namespace {

/// U(r) - lambda in the x = ln r form divided by r^2, i.e. the local
/// "kinetic deficit" entering the WKB exponent.
double excess(const RadialProblem& p, double r, double lambda) {
  return q_term(p, r) / (r * r) - lambda;
}

/// Walk from r_start by factor `ratio` until int sqrt(2m max(0, excess)) dr
/// reaches `target`, or r leaves [r_floor, r_ceil].
double wkb_edge(const RadialProblem& p, double lambda, double r_start, double ratio, double target,
                double r_floor, double r_ceil) {
  double r = r_start;
  double acc = 0.0;
  for (int i = 0; i < 20000; ++i) {
    const double next = r * ratio;
    if (next < r_floor) return r_floor;
    if (next > r_ceil) return r_ceil;
    const double mid = std::sqrt(r * next);
    acc += std::sqrt(2.0 * p.m_r * std::max(0.0, excess(p, mid, lambda))) * std::abs(next - r);
    r = next;
    if (acc >= target) return r;
  }
  return r;
}

}  // namespace

RadialGrid default_grid(const RadialProblem& problem, double energy, const OracleOptions& options) {
  const double lambda = energy + 0.5 * problem.s * problem.lambda_rot;
  constexpr int kScan = 4000;
  double r_in = 0.0;
  double r_out = 0.0;
  double r_best = 1.0;
  double best = std::numeric_limits<double>::infinity();
  for (int i = 0; i <= kScan; ++i) {
    const double r = std::pow(10.0, -8.0 + 16.0 * i / kScan);
    const double e = excess(problem, r, lambda);
    if (e < best) {
      best = e;
      r_best = r;
    }
    // a confining term cancelled inside V leaves only rounding noise at large r
    const double scale = static_cast<double>(problem.s) * problem.s / (2.0 * problem.m_r * r * r) +
                         std::abs(problem.lambda_conf) * r * r + std::abs(problem.potential(r)) + std::abs(lambda);
    if (e < -1e-10 * scale) {
      if (r_in == 0.0) r_in = r;
      r_out = r;
    }
  }
  if (r_out == 0.0) r_in = r_out = r_best;

  RadialGrid g;
  g.points = options.base_points;
  g.spacing = options.spacing;
  const double outer = wkb_edge(problem, lambda, r_out, 1.01, 40.0, 0.0, 1e8);
  g.rho_max = options.rho_max.value_or(std::max(6.0 * r_out, outer));
  const double floor = 1e-8 * r_out;
  g.rho_min = options.rho_min.value_or(std::max(floor, wkb_edge(problem, lambda, r_in, 1.0 / 1.01, 40.0, floor, 1e8)));
  if (options.spacing == Spacing::Uniform && !options.rho_min) g.rho_min = std::max(g.rho_min, 1e-3);
  return g;
}

OracleReport cross_validate(double energy, const RadialProblem& problem, const RadialWavefunction& wf,
                            const OracleOptions& options) {
  OracleReport rep;
  rep.grid = default_grid(problem, energy, options);
  const int levels = count_nodes(wf) + 3;

  std::vector<std::vector<double>> ladder;
  for (int f : {1, 2, 4}) {
    RadialGrid g = rep.grid;
    g.points = rep.grid.points * f;
    ladder.push_back(oracle_eigenvalues(discretize(problem, g), levels));
  }
  rep.energies = ladder.back();

  std::vector<double> extrap(static_cast<std::size_t>(levels));
  for (std::size_t k = 0; k < extrap.size(); ++k)
    extrap[k] = ladder[2][k] + (ladder[2][k] - ladder[1][k]) / 3.0;

  std::size_t best = 0;
  for (std::size_t k = 1; k < extrap.size(); ++k)
    if (std::abs(extrap[k] - energy) < std::abs(extrap[best] - energy)) best = k;

  rep.grid_convergence.raw = {ladder[0][best], ladder[1][best], ladder[2][best]};
  rep.grid_convergence.extrapolated = extrap[best];
  const double d1 = ladder[0][best] - ladder[1][best];
  const double d2 = ladder[1][best] - ladder[2][best];
  rep.grid_convergence.order = (d1 != 0.0 && d2 != 0.0) ? std::log2(std::abs(d1 / d2)) : 0.0;

  double spacing = std::numeric_limits<double>::infinity();
  if (best > 0) spacing = std::min(spacing, extrap[best] - extrap[best - 1]);
  if (best + 1 < extrap.size()) spacing = std::min(spacing, extrap[best + 1] - extrap[best]);

  OracleMatch mt;
  mt.level_index = static_cast<int>(best);
  mt.oracle_energy = ladder[2][best];
  mt.raw_gap = std::abs(ladder[2][best] - energy);
  mt.extrapolated_gap = std::abs(extrap[best] - energy);
  const double scale = std::max(std::abs(energy), std::isfinite(spacing) ? spacing : 0.0);
  mt.relative_gap = scale > 0.0 ? mt.extrapolated_gap / scale : mt.extrapolated_gap;

  const auto samples = default_residual_samples(wf);
  rep.residual_max = ode_residual(wf, problem, energy, samples, options.energy_floor);

  std::ostringstream msg;
  msg.precision(6);
  if (mt.relative_gap > 0.1) {
    msg << "no oracle level within 10% of E = " << energy << " (nearest " << extrap[best] << ")";
  } else {
    rep.matched = mt;
    rep.passed = mt.relative_gap < options.gap_tol && rep.residual_max < options.residual_tol;
    msg << "level " << best << ": oracle " << extrap[best] << ", relative gap " << mt.relative_gap
        << ", residual " << rep.residual_max << ", order " << rep.grid_convergence.order;
  }
  rep.message = msg.str();
  return rep;
}

}  // namespace qes

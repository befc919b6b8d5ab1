#include "qes/spectra.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include <Eigen/Dense>
#include <boost/math/tools/roots.hpp>

namespace qes {

namespace {

Eigen::MatrixXd to_eigen(const DenseMatrix<double>& m) {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(m.rows()), static_cast<Eigen::Index>(m.cols()));
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j)
      out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = m(i, j);
  return out;
}

std::string dump(const DenseMatrix<double>& m) {
  std::ostringstream os;
  os.precision(17);
  os << m;
  return os.str();
}

bool eigen_less(std::complex<double> a, std::complex<double> b) {
  if (a.real() != b.real()) return a.real() < b.real();
  return a.imag() < b.imag();
}

double nu_from_mu(const AnsatzParams& a, double mu) {
  const double shift = 0.5 * a.beta * a.d;
  // + 0.0 turns -0 into 0 for reporting
  return (a.family == Family::III ? shift - a.d - mu : shift - mu) + 0.0;
}

std::vector<std::complex<double>> eigenvector_of(const Eigen::MatrixXd& a, std::complex<double> mu,
                                                 const DenseMatrix<double>& original) {
  Eigen::EigenSolver<Eigen::MatrixXd> es(a, true);
  if (es.info() != Eigen::Success)
    throw NumericalError("eigen-solver did not converge for block\n" + dump(original));
  const auto vals = es.eigenvalues();
  Eigen::Index best = 0;
  for (Eigen::Index i = 1; i < vals.size(); ++i)
    if (std::abs(vals(i) - mu) < std::abs(vals(best) - mu)) best = i;
  Eigen::VectorXcd v = es.eigenvectors().col(best);

  Eigen::Index big = 0;
  for (Eigen::Index i = 1; i < v.size(); ++i)
    if (std::abs(v(i)) > std::abs(v(big))) big = i;
  v /= v(big);

  const Eigen::VectorXcd r = a.cast<std::complex<double>>() * v - vals(best) * v;
  const double scale = a.cwiseAbs().rowwise().sum().maxCoeff() * v.cwiseAbs().maxCoeff() + std::abs(mu);
  if (r.cwiseAbs().maxCoeff() > 1e-8 * std::max(scale, 1e-300)) {
    std::ostringstream msg;
    msg << "defective eigenpair (residual " << r.cwiseAbs().maxCoeff() << ") for mu = " << mu
        << " in block\n"
        << dump(original);
    throw NumericalError(msg.str());
  }
  return {v.data(), v.data() + v.size()};
}

}  // namespace

bool is_real_eigenvalue(std::complex<double> mu) {
  return std::abs(mu.imag()) <= 1e-10 * (1.0 + std::abs(mu));
}

std::vector<BranchEigen> block_eigenvalues(const QESBlock& block) {
  const Eigen::MatrixXd a = to_eigen(block.matrix);
  Eigen::EigenSolver<Eigen::MatrixXd> es(a, false);
  if (es.info() != Eigen::Success)
    throw NumericalError("eigen-solver did not converge for block\n" + dump(block.matrix));

  std::vector<std::complex<double>> mus(es.eigenvalues().data(),
                                        es.eigenvalues().data() + es.eigenvalues().size());
  std::sort(mus.begin(), mus.end(), eigen_less);

  std::vector<BranchEigen> out;
  out.reserve(mus.size());
  for (std::size_t i = 0; i < mus.size(); ++i) {
    BranchEigen b;
    b.is_real = is_real_eigenvalue(mus[i]);
    b.mu = b.is_real ? std::complex<double>(mus[i].real(), 0.0) : mus[i];
    b.nu = nu_from_mu(block.ansatz, mus[i].real());
    b.branch_index = static_cast<int>(i);
    out.push_back(b);
  }
  return out;
}

std::vector<std::complex<double>> right_eigenvector(const QESBlock& block, const BranchEigen& branch) {
  return eigenvector_of(to_eigen(block.matrix), branch.mu, block.matrix);
}

std::vector<std::complex<double>> left_eigenvector(const QESBlock& block, const BranchEigen& branch) {
  return eigenvector_of(to_eigen(block.matrix).transpose(), branch.mu, block.matrix);
}

// ---------------------------------------------------------------------------

namespace {

struct ResidualSample {
  double value = 0.0;
  double noise = 0.0;
};

struct ScanPoint {
  double f = 0.0;
  std::vector<double> mus;
  std::vector<ResidualSample> residuals;
};

ScanPoint evaluate_point(double f, const FamilyI& pot, const DerivedConstants& consts, CaseTag tag,
                         int s, int d) {
  const CouplingCase cc = coupling_at_frequency(tag, consts, f);
  const AnsatzParams a = ansatz_params(pot, cc, consts, s, d);
  const QESBlock block = qes_block(a);
  const auto branches = block_eigenvalues(block);
  const double eps = coulomb_epsilon(pot, consts);

  double norm = 0.0;
  for (std::size_t i = 0; i < block.matrix.rows(); ++i) {
    double row = 0.0;
    for (std::size_t j = 0; j < block.matrix.cols(); ++j) row += std::abs(block.matrix(i, j));
    norm = std::max(norm, row);
  }

  ScanPoint p;
  p.f = f;
  for (const auto& b : branches) {
    const double mu = b.mu.real();
    const double lin = a.eta * (1.0 + 2.0 * a.xi);
    p.mus.push_back(mu);
    p.residuals.push_back({eps + lin + a.c * mu,
                           1e-12 * (std::abs(eps) + std::abs(lin) + a.c * (std::abs(mu) + norm))});
  }
  return p;
}

}  // namespace

double quantization_residual_I(double f, const FamilyI& pot, const DerivedConstants& consts,
                               CaseTag tag, int s, int d, int branch) {
  if (branch < 0 || branch > d)
    throw std::out_of_range("quantization_residual_I: branch " + std::to_string(branch) +
                            " outside 0.." + std::to_string(d));
  return evaluate_point(f, pot, consts, tag, s, d).residuals[static_cast<std::size_t>(branch)].value;
}

FieldSolution solve_quantized_field_I(const FamilyI& pot, const DerivedConstants& consts,
                                      CaseTag tag, int s, int d, const FieldSolveOptions& opt) {
  FieldSolution out;
  const FieldScaling sc = field_scaling(tag, consts);
  double lo = opt.f_lo;
  if (pot.k2 < 0.0) {
    if (!(sc.conf > 0.0)) return out;
    lo = std::max(lo, std::sqrt(-pot.k2 / sc.conf) * (1.0 + 1e-9));
  }
  if (!(lo < opt.f_hi) || opt.scan_points < 2) return out;

  const int n = opt.scan_points;
  const double step = std::log(opt.f_hi / lo) / (n - 1);
  std::vector<ScanPoint> scan;
  scan.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) scan.push_back(evaluate_point(lo * std::exp(step * i), pot, consts, tag, s, d));

  const auto nb = static_cast<std::size_t>(d + 1);

  // Sorted order is the branch label; flag any point where nearest-value
  // matching against the previous point disagrees with it.
  for (std::size_t p = 1; p < scan.size(); ++p) {
    for (std::size_t b = 0; b < nb; ++b) {
      std::size_t nearest = 0;
      for (std::size_t c = 1; c < nb; ++c)
        if (std::abs(scan[p].mus[b] - scan[p - 1].mus[c]) <
            std::abs(scan[p].mus[b] - scan[p - 1].mus[nearest]))
          nearest = c;
      if (nearest != b) {
        std::ostringstream msg;
        msg << "eigenvalue crossing near f = " << scan[p].f << " (branch " << b
            << "); branches re-sorted by value";
        out.warnings.push_back(msg.str());
        break;
      }
    }
  }

  const auto tol = [&](double a, double b) {
    return std::abs(b - a) <= opt.rel_tol * std::max(std::abs(a), std::abs(b));
  };

  for (std::size_t b = 0; b < nb; ++b) {
    const bool degenerate = std::all_of(scan.begin(), scan.end(), [&](const ScanPoint& p) {
      return std::abs(p.residuals[b].value) <= p.residuals[b].noise;
    });
    if (degenerate) {
      out.degenerate_branches.push_back(static_cast<int>(b));
      continue;
    }
    const auto residual = [&](double f) {
      return quantization_residual_I(f, pot, consts, tag, s, d, static_cast<int>(b));
    };
    for (std::size_t p = 0; p < scan.size(); ++p) {
      const double r0 = scan[p].residuals[b].value;
      if (r0 == 0.0) {
        out.roots.push_back({scan[p].f, static_cast<int>(b)});
        continue;
      }
      if (p + 1 == scan.size()) break;
      const double r1 = scan[p + 1].residuals[b].value;
      if (r1 == 0.0 || (r0 < 0.0) == (r1 < 0.0)) continue;
      if (std::abs(r0) <= scan[p].residuals[b].noise && std::abs(r1) <= scan[p + 1].residuals[b].noise)
        continue;
      std::uintmax_t max_iter = 200;
      const auto bracket = boost::math::tools::bisect(residual, scan[p].f, scan[p + 1].f, tol, max_iter);
      out.roots.push_back({0.5 * (bracket.first + bracket.second), static_cast<int>(b)});
    }
  }
  std::sort(out.roots.begin(), out.roots.end(), [](const FieldRoot& x, const FieldRoot& y) {
    return x.branch != y.branch ? x.branch < y.branch : x.frequency < y.frequency;
  });
  return out;
}

// ---------------------------------------------------------------------------

std::optional<double> solve_quantized_field_II(const FamilyII& pot, const DerivedConstants& consts,
                                               CaseTag tag, int s, int d, FormulaSet formulas) {
  const AnsatzParams a = ansatz_params(pot, CouplingCase{tag, 0.0, 0.0}, consts, s, d);
  const double m = consts.m_r;
  const double xi_shift = formulas == FormulaSet::PaperPrinted ? 1.0 : 2.0;
  // 2 m_r lambda_conf required for the r^3 term of the rotated equation to
  // cancel against the top-degree derivative term.
  const double rhs = 4.0 * a.eta * a.eta - 8.0 * a.tau * (a.xi + xi_shift) - 16.0 * a.tau * d -
                     2.0 * m * pot.k2;
  const double f2 = rhs / (2.0 * m * field_scaling(tag, consts).conf);
  if (!(f2 > 0.0) || !std::isfinite(f2)) return std::nullopt;
  return std::sqrt(f2);
}

ConstraintsIII solve_constraints_III(const FamilyIII& pot, const DerivedConstants& consts,
                                     CaseTag tag, int s, int d, int branch, FormulaSet formulas) {
  if (!(pot.k2 > 0.0)) throw DomainError("Family III: no admissible field, k2 must be positive");
  const FieldScaling sc = field_scaling(tag, consts);
  ConstraintsIII out;
  out.frequency = std::sqrt(pot.k2 / sc.conf);
  const CouplingCase cc = coupling_at_frequency(tag, consts, out.frequency);
  const AnsatzParams a = ansatz_params(pot, cc, consts, s, d);
  const auto branches = block_eigenvalues(qes_block(a));
  if (branch < 0 || branch > d)
    throw std::out_of_range("solve_constraints_III: branch " + std::to_string(branch) +
                            " outside 0.." + std::to_string(d));
  out.branch = branches[static_cast<std::size_t>(branch)];
  const double mu = out.branch.mu.real();
  const double eta_tau = formulas == FormulaSet::PaperPrinted ? -2.0 * a.eta * a.tau
                                                              : 2.0 * a.eta * a.tau;
  out.l2 = (a.xi * a.xi - eta_tau - static_cast<double>(s) * s - mu) / (2.0 * consts.m_r);
  return out;
}

// ---------------------------------------------------------------------------

double relative_energy(const AnsatzParams& a, const CouplingCase& coupling,
                       const DerivedConstants& consts, double mu, FormulaSet formulas) {
  const double m = consts.m_r;
  const double rot = 0.5 * a.s * coupling.lambda_rot;
  switch (a.family) {
    case Family::I:
      return (4.0 * a.tau * (a.xi + 1.0 + a.d) - a.eta * a.eta) / (2.0 * m) - rot;
    case Family::II:
      return 2.0 * a.eta * (a.xi + 1.0) / m + 2.0 * a.c * mu / m - rot;
    case Family::III: {
      const double eta_term = formulas == FormulaSet::PaperPrinted ? a.eta * a.eta / (2.0 * m)
                                                                    : a.eta * a.eta / m;
      return -0.5 * (a.s * coupling.lambda_rot + eta_term);
    }
  }
  throw std::logic_error("relative_energy: unknown family");
}

double relative_energy(const AnsatzParams& a, const CouplingCase& coupling,
                       const DerivedConstants& consts, const BranchEigen& branch,
                       FormulaSet formulas) {
  if (!branch.is_real) throw DomainError("relative_energy: complex branch rejected");
  return relative_energy(a, coupling, consts, branch.mu.real(), formulas);
}

}  // namespace qes

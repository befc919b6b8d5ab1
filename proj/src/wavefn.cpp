#include "qes/wavefn.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

namespace qes {

std::vector<double> polynomial_from_eigenvector(const QESBlock& block, const BranchEigen& branch) {
  if (!branch.is_real) throw DomainError("polynomial_from_eigenvector: complex branch");
  const auto v = right_eigenvector(block, branch);
  const int d = static_cast<int>(v.size()) - 1;

  std::vector<double> scaled(v.size());
  double ck = 1.0;
  for (std::size_t k = 0; k < v.size(); ++k) {
    scaled[k] = v[k].real() * ck;
    ck *= block.scaling_c;
  }
  const double lead = scaled.back();
  if (lead == 0.0) throw NumericalError("polynomial_from_eigenvector: vanishing leading coefficient");
  for (auto& x : scaled) x /= lead;

  if (block.variable_map == VariableMap::Identity) return scaled;
  std::vector<double> out(static_cast<std::size_t>(2 * d + 1), 0.0);
  for (int k = 0; k <= d; ++k) out[static_cast<std::size_t>(2 * k)] = scaled[static_cast<std::size_t>(k)];
  return out;
}

std::vector<double> to_scaled_coefficients(const QESBlock& block, const std::vector<double>& physical) {
  std::vector<double> in_u;
  if (block.variable_map == VariableMap::Identity) {
    in_u = physical;
  } else {
    for (std::size_t k = 0; k < physical.size(); k += 2) in_u.push_back(physical[k]);
  }
  double ck = 1.0;
  for (auto& x : in_u) {
    x /= ck;
    ck *= block.scaling_c;
  }
  return in_u;
}

RadialWavefunction make_wavefunction(const QESBlock& block, const BranchEigen& branch) {
  RadialWavefunction wf;
  wf.family = block.family;
  wf.ansatz = block.ansatz;
  wf.poly = polynomial_from_eigenvector(block, branch);
  return wf;
}

std::vector<ExponentTerm> exponent_terms(const AnsatzParams& a) {
  switch (a.family) {
    case Family::I: return {{-a.tau, 2}, {-a.eta, 1}};
    case Family::II: return {{-a.tau, 4}, {-a.eta, 2}};
    case Family::III: return {{-a.tau, -1}, {-a.eta, 1}};
  }
  return {};
}

PolyJet evaluate_poly_jet(const std::vector<double>& poly, double x) {
  PolyJet j;
  for (auto it = poly.rbegin(); it != poly.rend(); ++it) {
    j.d2p = j.d2p * x + 2.0 * j.dp;
    j.dp = j.dp * x + j.p;
    j.p = j.p * x + *it;
  }
  return j;
}

namespace {

double exponent_at(const std::vector<ExponentTerm>& terms, double xi, double rho) {
  double phi = xi * std::log(rho);
  for (const auto& t : terms) phi += t.coef * std::pow(rho, t.power);
  return phi;
}

}  // namespace

ZetaValue evaluate_zeta(const RadialWavefunction& wf, double rho) {
  if (!(rho > 0.0)) {
    std::ostringstream msg;
    msg << "evaluate_zeta: rho must be positive, got " << rho;
    throw DomainError(msg.str());
  }
  ZetaValue z;
  const double p = evaluate_poly_jet(wf.poly, rho).p;
  if (p == 0.0) {
    z.sign = 0;
    z.log_abs = -std::numeric_limits<double>::infinity();
    z.value = 0.0;
    return z;
  }
  z.sign = p > 0.0 ? 1 : -1;
  z.log_abs = exponent_at(exponent_terms(wf.ansatz), wf.ansatz.xi, rho) + std::log(std::abs(p));
  constexpr double kMaxLog = 700.0;
  z.representable = std::abs(z.log_abs) <= kMaxLog;
  z.value = z.sign * std::exp(z.log_abs);
  return z;
}

RadialWavefunction normalize(RadialWavefunction wf, const QuadratureConfig& config) {
  if (!wf.ansatz.normalizable) throw DomainError("normalize: wavefunction is not normalisable");
  const auto terms = exponent_terms(wf.ansatz);
  const double xi = wf.ansatz.xi;

  // log of zeta^2 r without the polynomial; used to locate the peak and to
  // shift the integrand into floating-point range.
  const auto log_weight = [&](double r) { return 2.0 * exponent_at(terms, xi, r) + std::log(r); };

  double peak = 1.0;
  double shift = -std::numeric_limits<double>::infinity();
  constexpr int kScan = 4000;
  for (int i = 0; i <= kScan; ++i) {
    const double r = std::pow(10.0, -8.0 + 16.0 * i / kScan);
    const double p = evaluate_poly_jet(wf.poly, r).p;
    if (p == 0.0) continue;
    const double v = log_weight(r) + 2.0 * std::log(std::abs(p));
    if (v > shift) {
      shift = v;
      peak = r;
    }
  }

  const auto integrand = [&](double r) -> double {
    if (!(r > 0.0)) return 0.0;
    const double e = log_weight(r) - shift;
    if (e < -800.0 || std::isnan(e)) return 0.0;
    const double p = evaluate_poly_jet(wf.poly, r).p;
    return std::exp(e) * p * p;
  };

  boost::math::quadrature::tanh_sinh<double> inner;
  boost::math::quadrature::exp_sinh<double> outer;
  double err_in = 0.0;
  double err_out = 0.0;
  const double tol = config.rel_tol * 1e-2;
  const double a = inner.integrate(integrand, 0.0, peak, tol, &err_in);
  const double b = outer.integrate(integrand, peak, std::numeric_limits<double>::infinity(), tol, &err_out);
  const double total = a + b;
  if (!(total > 0.0) || !std::isfinite(total)) throw NumericalError("normalize: integral is not finite and positive");
  if (err_in + err_out > config.rel_tol * total) {
    std::ostringstream msg;
    msg << "normalize: quadrature error estimate " << (err_in + err_out) / total << " exceeds tolerance";
    throw NumericalError(msg.str());
  }
  wf.norm = std::exp(0.5 * shift) * std::sqrt(total);
  return wf;
}

// ---------------------------------------------------------------------------
// Sturm sequences

namespace {

using Poly = std::vector<double>;

void trim(Poly& p, double scale) {
  const double cut = 1e-12 * scale;
  while (!p.empty() && std::abs(p.back()) <= cut) p.pop_back();
}

double max_abs(const Poly& p) {
  double m = 0.0;
  for (double c : p) m = std::max(m, std::abs(c));
  return m;
}

Poly derivative(const Poly& p) {
  Poly out;
  for (std::size_t k = 1; k < p.size(); ++k) out.push_back(static_cast<double>(k) * p[k]);
  return out;
}

/// Remainder of a / b (b nonempty with nonzero leading coefficient).
Poly remainder(Poly a, const Poly& b) {
  const double scale = max_abs(a);
  while (a.size() >= b.size() && !a.empty()) {
    const double factor = a.back() / b.back();
    const std::size_t shift = a.size() - b.size();
    for (std::size_t k = 0; k < b.size(); ++k) a[k + shift] -= factor * b[k];
    a.pop_back();
    trim(a, scale);
  }
  return a;
}

int sign_at_zero_plus(const Poly& p) {
  for (double c : p)
    if (c != 0.0) return c > 0.0 ? 1 : -1;
  return 0;
}

int sign_at_infinity(const Poly& p) {
  for (auto it = p.rbegin(); it != p.rend(); ++it)
    if (*it != 0.0) return *it > 0.0 ? 1 : -1;
  return 0;
}

int sign_changes(const std::vector<int>& signs) {
  int changes = 0;
  int last = 0;
  for (int s : signs) {
    if (s == 0) continue;
    if (last != 0 && s != last) ++changes;
    last = s;
  }
  return changes;
}

}  // namespace

int count_positive_roots(const std::vector<double>& poly) {
  Poly p = poly;
  trim(p, max_abs(p));
  if (p.size() <= 1) return 0;

  std::vector<Poly> seq{p, derivative(p)};
  trim(seq.back(), max_abs(seq.back()));
  while (seq.back().size() > 1) {
    Poly r = remainder(seq[seq.size() - 2], seq.back());
    if (r.empty()) break;
    for (double& c : r) c = -c;
    seq.push_back(std::move(r));
  }

  std::vector<int> at_zero;
  std::vector<int> at_inf;
  for (const auto& q : seq) {
    at_zero.push_back(sign_at_zero_plus(q));
    at_inf.push_back(sign_at_infinity(q));
  }
  return sign_changes(at_zero) - sign_changes(at_inf);
}

int count_nodes(const RadialWavefunction& wf) {
  if (wf.family != Family::II) return count_positive_roots(wf.poly);
  std::vector<double> in_w;
  for (std::size_t k = 0; k < wf.poly.size(); k += 2) in_w.push_back(wf.poly[k]);
  return count_positive_roots(in_w);
}

}  // namespace qes

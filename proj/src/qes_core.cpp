#include "qes/qes_core.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace qes {

DerivedConstants derive_constants(const ParticlePair& pair) {
  if (!(pair.m1 > 0.0) || !(pair.m2 > 0.0)) {
    std::ostringstream msg;
    msg << "derive_constants: masses must be positive (m1=" << pair.m1 << ", m2=" << pair.m2 << ")";
    throw DomainError(msg.str());
  }
  DerivedConstants c;
  c.e1 = pair.e1;
  c.e2 = pair.e2;
  c.B = pair.B;
  c.M = pair.m1 + pair.m2;
  c.mu1 = pair.m1 / c.M;
  c.mu2 = pair.m2 / c.M;
  c.m_r = pair.m1 * pair.m2 / c.M;
  c.q = pair.e1 + pair.e2;
  c.e_c = c.mu2 * pair.e1 - c.mu1 * pair.e2;
  c.q_W = pair.e1 * c.mu2 * c.mu2 + pair.e2 * c.mu1 * c.mu1;
  c.omega_c = c.q * pair.B / c.M;
  c.Omega_q = pair.e1 * pair.B / (2.0 * c.m_r);
  c.omega_q = pair.e1 * pair.B * std::abs(c.mu2 - c.mu1) / c.m_r;
  return c;
}

std::string_view to_string(CaseTag tag) {
  return tag == CaseTag::ChargedEc0 ? "charged" : "neutral";
}

CaseTag parse_case_tag(std::string_view name) {
  if (name == "charged" || name == "ChargedEc0") return CaseTag::ChargedEc0;
  if (name == "neutral" || name == "NeutralRest") return CaseTag::NeutralRest;
  throw std::invalid_argument("unknown coupling case '" + std::string(name) +
                              "' (expected 'charged' or 'neutral')");
}

CouplingCase effective_radial_problem(const DerivedConstants& consts, CaseTag tag, double tol) {
  const double scale = std::max(std::abs(consts.e1), std::abs(consts.e2));
  if (tag == CaseTag::ChargedEc0 && std::abs(consts.e_c) > tol * scale) {
    std::ostringstream msg;
    msg << "charged case requires e_c = 0, got e_c = " << consts.e_c;
    throw AdmissibilityError(msg.str());
  }
  if (tag == CaseTag::NeutralRest && std::abs(consts.q) > tol * scale) {
    std::ostringstream msg;
    msg << "neutral case requires q = 0, got q = " << consts.q;
    throw AdmissibilityError(msg.str());
  }
  return coupling_at_frequency(tag, consts, case_frequency(tag, consts));
}

FieldScaling field_scaling(CaseTag tag, const DerivedConstants& consts) {
  if (tag == CaseTag::ChargedEc0) return {1.0, consts.m_r / 8.0};
  return {2.0 * std::abs(consts.mu2 - consts.mu1), consts.m_r / 2.0};
}

CouplingCase coupling_at_frequency(CaseTag tag, const DerivedConstants& consts, double f) {
  const FieldScaling k = field_scaling(tag, consts);
  return {tag, k.rot * f, k.conf * f * f};
}

double case_frequency(CaseTag tag, const DerivedConstants& consts) {
  return tag == CaseTag::ChargedEc0 ? consts.omega_c : consts.Omega_q;
}

std::string_view frequency_name(CaseTag tag) {
  return tag == CaseTag::ChargedEc0 ? "omega_c" : "Omega_q";
}

std::string_view to_string(Family f) {
  switch (f) {
    case Family::I: return "I";
    case Family::II: return "II";
    case Family::III: return "III";
  }
  return "?";
}

Family parse_family(std::string_view name) {
  if (name == "I" || name == "1") return Family::I;
  if (name == "II" || name == "2") return Family::II;
  if (name == "III" || name == "3") return Family::III;
  throw std::invalid_argument("unknown potential family '" + std::string(name) + "'");
}

Family family_of(const PotentialSpec& pot) {
  return static_cast<Family>(pot.index());
}

double coulomb_epsilon(const FamilyI& pot, const DerivedConstants& consts) {
  return 2.0 * consts.m_r * pot.g_c;
}

namespace {

double centrifugal_xi(double theta, int s, double m_r) {
  const double a = static_cast<double>(s) * s + 2.0 * theta * m_r;
  if (a < 0.0) {
    std::ostringstream msg;
    msg << "fall to the centre: s^2 + 2 theta m_r = " << a << " < 0 (s=" << s
        << ", theta=" << theta << ")";
    throw FallToCentreError(msg.str());
  }
  return std::sqrt(a);
}

AnsatzParams family_one(const FamilyI& pot, const CouplingCase& cc, const DerivedConstants& k,
                        AnsatzParams a) {
  const double m = k.m_r;
  const double radicand = 8.0 * m * (cc.lambda_conf + pot.k2);
  if (!(radicand > 0.0)) {
    std::ostringstream msg;
    msg << "Family I: confinement radicand " << radicand << " must be positive";
    throw DomainError(msg.str());
  }
  a.tau = 0.25 * std::sqrt(radicand);
  a.eta = pot.k1 * m / (2.0 * a.tau);
  a.xi = centrifugal_xi(pot.theta, a.s, m);
  a.c = 2.0 * std::sqrt(a.tau);
  a.beta = 2.0 * a.eta / a.c;
  a.alpha = 1.0 + 2.0 * a.xi + 0.5 * a.d;
  a.normalizable = a.tau > 0.0;
  return a;
}

AnsatzParams family_two(const FamilyII& pot, const DerivedConstants& k, AnsatzParams a) {
  const double m = k.m_r;
  if (!(pot.k6 > 0.0)) throw DomainError("Family II: k6 must be positive");
  a.tau = std::sqrt(2.0 * pot.k6 * m) / 4.0;
  a.eta = pot.k4 * m / (8.0 * a.tau);
  a.xi = centrifugal_xi(pot.theta, a.s, m);
  a.c = 2.0 * std::sqrt(a.tau);
  a.beta = a.eta / std::sqrt(a.tau);
  a.alpha = 1.0 + a.xi + 0.5 * a.d;
  a.normalizable = a.tau > 0.0;
  return a;
}

AnsatzParams family_three(const FamilyIII& pot, const DerivedConstants& k, AnsatzParams a) {
  const double m = k.m_r;
  if (!(pot.l4 > 0.0)) throw DomainError("Family III: l4 must be positive");
  a.tau = std::sqrt(2.0 * pot.l4 * m);
  const double denom = pot.l3 * m + a.tau * (a.d + 1);
  if (denom == 0.0) {
    throw DegenerateParameterError("Family III: l3 m_r + tau (d + 1) vanishes; ansatz is singular");
  }
  a.xi = 0.5 + pot.l3 * m / a.tau;
  a.eta = -pot.l1 * m * a.tau / denom;
  a.gamma = a.eta;
  a.alpha = a.tau;
  a.beta = -2.0 * pot.l3 * m / a.tau - a.d;
  a.c = 1.0;
  a.normalizable = a.eta > 0.0 && a.tau > 0.0;
  return a;
}

}  // namespace

AnsatzParams ansatz_params(const PotentialSpec& pot, const CouplingCase& coupling,
                           const DerivedConstants& consts, int s, int d) {
  if (d < 0) throw std::invalid_argument("ansatz_params: degree d must be >= 0");
  AnsatzParams a;
  a.family = family_of(pot);
  a.d = d;
  a.s = s;
  return std::visit(
      [&](const auto& p) -> AnsatzParams {
        using P = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<P, FamilyI>) return family_one(p, coupling, consts, a);
        else if constexpr (std::is_same_v<P, FamilyII>) return family_two(p, consts, a);
        else return family_three(p, consts, a);
      },
      pot);
}

CanonicalCoefficients<double> canonical_coefficients(const AnsatzParams& a) {
  CanonicalCoefficients<double> k;
  k.family = a.family;
  k.d = a.d;
  k.beta = a.beta;
  k.xi = a.xi;
  k.gamma = a.gamma;
  k.alpha = a.alpha;
  return k;
}

QESBlock qes_block(const AnsatzParams& ansatz) {
  QESBlock b;
  b.matrix = canonical_block_matrix(canonical_coefficients(ansatz));
  b.scaling_c = ansatz.c;
  b.variable_map = ansatz.family == Family::II ? VariableMap::SquareMap : VariableMap::Identity;
  b.family = ansatz.family;
  b.ansatz = ansatz;
  return b;
}

InvarianceCertificate<double> invariance_check(const AnsatzParams& ansatz) {
  return check_invariance(canonical_operator(canonical_coefficients(ansatz)), ansatz.d);
}

}  // namespace qes

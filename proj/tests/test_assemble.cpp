#include "catch_amalgamated.hpp"

#include <cmath>

#include "qes/assemble.hpp"

using namespace qes;
using Catch::Approx;

namespace {

SpectrumRequest coulomb_request() {
  SpectrumRequest r;
  r.pair = {1, 1, 1, 1, 1};
  r.potential = FamilyI{1.0, 0, 0, 0};
  r.d_list = {0, 1};
  r.s_list = {0};
  return r;
}

SpectrumRequest sextic_request() {
  SpectrumRequest r;
  r.pair = {2, 2, 1, 1, 0};
  r.potential = FamilyII{0, -4.0, 0, 0.5};
  return r;
}

SpectrumRequest inverse_quartic_request() {
  SpectrumRequest r;
  r.pair = {2, 2, 1, 1, 0};
  r.potential = FamilyIII{-1.0, 0, 0, 0.5, 0.5};
  r.solve_for = SolveFor::PotentialParam;
  return r;
}

std::vector<int> range(int a, int b) {
  std::vector<int> v;
  for (int i = a; i <= b; ++i) v.push_back(i);
  return v;
}

}  // namespace

TEST_CASE("Coulomb batch", "[assemble]") {
  const auto res = assemble_spectrum(coulomb_request());
  // d = 0 has residual eps = 1 for every field: only the d = 1 line survives.
  REQUIRE(res.lines.size() == 1);
  const auto& l = res.lines[0];
  CHECK(l.family == Family::I);
  CHECK(l.d == 1);
  CHECK(l.branch == 0);
  CHECK(l.quantized_name == "omega_c");
  CHECK(l.field == Approx(2.0).epsilon(1e-11));
  CHECK(l.quantized_value == l.field);
  CHECK(l.E_rho == Approx(2.0).epsilon(1e-11));
  CHECK(l.mu == Approx(-1.0).epsilon(1e-11));
  CHECK(l.nu == Approx(1.0).epsilon(1e-11));
  CHECK(l.real_branch);
  CHECK(l.normalizable);
  CHECK(l.nodes == 0);
  CHECK(res.failures.empty());
}

TEST_CASE("Family II hand case is a single line", "[assemble]") {
  const auto res = assemble_spectrum(sextic_request());
  REQUIRE(res.lines.size() == 1);
  const auto& l = res.lines[0];
  CHECK(l.field == 4.0);
  CHECK(l.E_rho == Approx(0.0).margin(1e-14));
  CHECK(l.poly == std::vector<double>{1.0});
  CHECK(l.nodes == 0);
}

TEST_CASE("Family II with k2 = 0 is empty without error", "[assemble]") {
  auto req = sextic_request();
  req.potential = FamilyII{0, 0.0, 0, 0.5};
  const auto res = assemble_spectrum(req);
  CHECK(res.lines.empty());
  CHECK(res.failures.empty());
}

TEST_CASE("Family III hand case", "[assemble]") {
  const auto res = assemble_spectrum(inverse_quartic_request());
  REQUIRE(res.lines.size() == 1);
  const auto& l = res.lines[0];
  CHECK(l.family == Family::III);
  CHECK(l.quantized_name == "l2");
  CHECK(l.quantized_value == -0.875);
  CHECK(l.field == 2.0);
  CHECK(l.E_rho == -0.5);
  auto paper = inverse_quartic_request();
  paper.formulas = FormulaSet::PaperPrinted;
  const auto p = assemble_spectrum(paper);
  REQUIRE(p.lines.size() == 1);
  CHECK(p.lines[0].quantized_value == 1.125);
  CHECK(p.lines[0].E_rho == -0.25);
}

TEST_CASE("results do not depend on the number of jobs", "[assemble]") {
  std::vector<SpectrumRequest> reqs{coulomb_request(), sextic_request(), inverse_quartic_request()};
  reqs[0].potential = FamilyI{1.0, 0.3, 0.2, 0.1};
  reqs[1].potential = FamilyII{0.2, 1.0, -4.0, 0.5};
  for (auto& r : reqs) {
    r.d_list = range(0, 4);
    r.s_list = range(-2, 2);
    r.jobs = 1;
    const auto serial = assemble_spectrum(r);
    r.jobs = 4;
    const auto parallel = assemble_spectrum(r);
    CHECK_FALSE(serial.lines.empty());
    CHECK(serial.lines == parallel.lines);
    CHECK(serial.warnings == parallel.warnings);
    CHECK(serial.failures.size() == parallel.failures.size());
    for (std::size_t i = 1; i < serial.lines.size(); ++i) CHECK(serial.lines[i - 1].E_rho <= serial.lines[i].E_rho);
  }
}

TEST_CASE("every line satisfies its quantisation condition", "[assemble]") {
  std::vector<SpectrumRequest> reqs{coulomb_request(), sextic_request(), inverse_quartic_request()};
  reqs[0].potential = FamilyI{0.8, 0.25, 0.1, 0.05};
  reqs[1].potential = FamilyII{0.3, -10.0, -6.0, 0.7};
  reqs[2].potential = FamilyIII{-1.3, 0, 0.4, 0.6, 0.8};
  for (auto& r : reqs) {
    r.d_list = range(0, 4);
    r.s_list = range(-2, 2);
    const auto res = assemble_spectrum(r);
    REQUIRE_FALSE(res.lines.empty());
    for (const auto& l : res.lines) {
      INFO("family " << to_string(l.family) << " d " << l.d << " s " << l.s << " branch " << l.branch);
      CHECK(std::abs(line_quantization_residual(r, l)) < 1e-10);
    }
  }
}

TEST_CASE("real normalisable lines solve the radial ODE", "[assemble]") {
  std::vector<SpectrumRequest> reqs{coulomb_request(), sextic_request(), inverse_quartic_request()};
  reqs[0].potential = FamilyI{0.8, 0.25, 0.1, 0.05};
  reqs[1].potential = FamilyII{0.3, -10.0, -6.0, 0.7};
  reqs[2].potential = FamilyIII{-1.3, 0, 0.4, 0.6, 0.8};
  for (auto& r : reqs) {
    r.d_list = range(0, 3);
    r.s_list = range(-1, 1);
    int checked = 0;
    for (const auto& l : assemble_spectrum(r).lines) {
      if (!l.real_branch || !l.normalizable) continue;
      const auto wf = line_wavefunction(r, l);
      const auto prob = line_problem(r, l);
      INFO("family " << to_string(l.family) << " d " << l.d << " s " << l.s << " branch " << l.branch);
      CHECK(ode_residual(wf, prob, l.E_rho, default_residual_samples(wf)) < 1e-8);
      ++checked;
    }
    CHECK(checked > 0);
  }
}

TEST_CASE("complex and non-normalisable lines are kept with flags", "[assemble]") {
  SECTION("non-normalisable") {
    auto r = inverse_quartic_request();
    r.potential = FamilyIII{1.0, 0, 0, 0.5, 0.5};
    r.d_list = range(0, 3);
    const auto res = assemble_spectrum(r);
    CHECK(res.lines.size() == 10);
    for (const auto& l : res.lines) CHECK_FALSE(l.normalizable);
  }
  SECTION("complex branches") {
    auto r = inverse_quartic_request();
    r.potential = FamilyIII{1.0, 0, 0, 0.5, 0.5};
    r.d_list = range(1, 4);
    const auto res = assemble_spectrum(r);
    std::size_t complex_lines = 0;
    for (const auto& l : res.lines) complex_lines += l.real_branch ? 0 : 1;
    CHECK(complex_lines > 0);
  }
}

TEST_CASE("Family I degenerate branch uses the configured field", "[assemble]") {
  auto r = coulomb_request();
  r.pair.B = 2.0;  // omega_c = 2
  r.potential = FamilyI{0.0, 0, 0, 0};
  r.d_list = {2};
  r.s_list = {1, 2, 3};
  const auto res = assemble_spectrum(r);
  REQUIRE(res.lines.size() == 3);
  CHECK(res.warnings.size() == 3);
  for (const auto& l : res.lines) {
    CHECK(l.field == 2.0);
    CHECK(l.branch == 1);
    CHECK(l.E_rho == res.lines[0].E_rho);
  }

  r.pair.B = 0.0;
  const auto none = assemble_spectrum(r);
  CHECK(none.lines.empty());
  CHECK(none.failures.size() == 3);
}

TEST_CASE("request validation", "[assemble][errors]") {
  auto r = coulomb_request();
  r.solve_for = SolveFor::PotentialParam;
  CHECK_THROWS_AS(assemble_spectrum(r), DomainError);

  auto t = inverse_quartic_request();
  t.solve_for = SolveFor::Field;
  CHECK_THROWS_AS(assemble_spectrum(t), DomainError);

  auto e = coulomb_request();
  e.d_list.clear();
  CHECK_THROWS_AS(assemble_spectrum(e), DomainError);
  e = coulomb_request();
  e.d_list = {-1};
  CHECK_THROWS_AS(assemble_spectrum(e), DomainError);

  auto a = coulomb_request();
  a.pair = {1, 2, 1, 1, 1};  // e_c != 0
  CHECK_THROWS_AS(assemble_spectrum(a), AdmissibilityError);
  a.case_tag = CaseTag::NeutralRest;  // q != 0
  CHECK_THROWS_AS(assemble_spectrum(a), AdmissibilityError);
}

TEST_CASE("per-cell failures do not abort the batch", "[assemble]") {
  // theta = -2 with m_r = 1/2 falls to the centre for |s| <= 1 only.
  auto r = coulomb_request();
  r.potential = FamilyI{1.0, -2.0, 0, 0};
  r.d_list = {1};
  r.s_list = {0, 2};
  const auto res = assemble_spectrum(r);
  REQUIRE(res.failures.size() == 1);
  CHECK(res.failures[0].s == 0);
  CHECK(res.failures[0].branch == -1);
  CHECK_FALSE(res.lines.empty());
  for (const auto& l : res.lines) CHECK(l.s == 2);
}

TEST_CASE("sort_for_output", "[assemble]") {
  auto r = coulomb_request();
  r.potential = FamilyI{1.0, 0.3, 0.2, 0.1};
  r.d_list = range(0, 3);
  r.s_list = range(-1, 1);
  auto lines = assemble_spectrum(r).lines;
  sort_for_output(lines);
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto& a = lines[i - 1];
    const auto& b = lines[i];
    CHECK(std::tie(a.d, a.s, a.branch) <= std::tie(b.d, b.s, b.branch));
  }
}

TEST_CASE("cross_validate_line on the fixtures", "[assemble][oracle]") {
  for (const auto& r : {coulomb_request(), sextic_request(), inverse_quartic_request()}) {
    const auto res = assemble_spectrum(r);
    REQUIRE_FALSE(res.lines.empty());
    const auto rep = cross_validate_line(r, res.lines.front());
    INFO(rep.message);
    CHECK(rep.passed);
  }
}

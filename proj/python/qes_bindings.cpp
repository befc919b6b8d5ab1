#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "qes/cli.hpp"

namespace py = pybind11;
using namespace qes;

namespace {

template <class T>
std::string repr_line(const T& l) {
  std::ostringstream os;
  os << "SpectrumLine(family=" << to_string(l.family) << ", d=" << l.d << ", s=" << l.s << ", branch=" << l.branch
     << ", " << l.quantized_name << "=" << format_double(l.quantized_value) << ", E_rho=" << format_double(l.E_rho)
     << ")";
  return os.str();
}

QESBlock make_block(Family family, int d, double beta, double xi, double gamma, double alpha) {
  if (d < 0) throw DomainError("d must be >= 0");
  QESBlock b;
  b.family = family;
  b.ansatz.family = family;
  b.ansatz.d = d;
  b.ansatz.beta = beta;
  b.ansatz.xi = xi;
  b.ansatz.gamma = gamma;
  b.ansatz.alpha = alpha;
  b.matrix = canonical_block_matrix(CanonicalCoefficients<double>{family, d, beta, xi, gamma, alpha});
  return b;
}

std::vector<std::vector<double>> to_rows(const DenseMatrix<double>& m) {
  std::vector<std::vector<double>> rows(m.rows(), std::vector<double>(m.cols()));
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) rows[i][j] = m(i, j);
  return rows;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Quasi-exactly solvable levels of two charges on a plane in a magnetic field";

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
  py::register_exception<NumericalError>(m, "NumericalError", PyExc_RuntimeError);

  py::enum_<Family>(m, "Family").value("I", Family::I).value("II", Family::II).value("III", Family::III);
  py::enum_<CaseTag>(m, "CaseTag")
      .value("charged", CaseTag::ChargedEc0)
      .value("neutral", CaseTag::NeutralRest);
  py::enum_<SolveFor>(m, "SolveFor").value("field", SolveFor::Field).value("l2", SolveFor::PotentialParam);
  py::enum_<FormulaSet>(m, "FormulaSet")
      .value("derived", FormulaSet::Derived)
      .value("paper_printed", FormulaSet::PaperPrinted);

  py::class_<ParticlePair>(m, "ParticlePair")
      .def(py::init([](double m1, double m2, double e1, double e2, double B) { return ParticlePair{m1, m2, e1, e2, B}; }),
           py::arg("m1"), py::arg("m2"), py::arg("e1"), py::arg("e2"), py::arg("B") = 0.0)
      .def_readwrite("m1", &ParticlePair::m1)
      .def_readwrite("m2", &ParticlePair::m2)
      .def_readwrite("e1", &ParticlePair::e1)
      .def_readwrite("e2", &ParticlePair::e2)
      .def_readwrite("B", &ParticlePair::B);

  py::class_<DerivedConstants>(m, "DerivedConstants")
      .def_readonly("M", &DerivedConstants::M)
      .def_readonly("m_r", &DerivedConstants::m_r)
      .def_readonly("mu1", &DerivedConstants::mu1)
      .def_readonly("mu2", &DerivedConstants::mu2)
      .def_readonly("q", &DerivedConstants::q)
      .def_readonly("e_c", &DerivedConstants::e_c)
      .def_readonly("q_W", &DerivedConstants::q_W)
      .def_readonly("omega_c", &DerivedConstants::omega_c)
      .def_readonly("Omega_q", &DerivedConstants::Omega_q)
      .def_readonly("omega_q", &DerivedConstants::omega_q);
  m.def("derive_constants", &derive_constants, py::arg("pair"));

  py::class_<FamilyI>(m, "FamilyI")
      .def(py::init([](double g_c, double theta, double k1, double k2) { return FamilyI{g_c, theta, k1, k2}; }),
           py::arg("g_c") = 0.0, py::arg("theta") = 0.0, py::arg("k1") = 0.0, py::arg("k2") = 0.0)
      .def_readwrite("g_c", &FamilyI::g_c)
      .def_readwrite("theta", &FamilyI::theta)
      .def_readwrite("k1", &FamilyI::k1)
      .def_readwrite("k2", &FamilyI::k2);
  py::class_<FamilyII>(m, "FamilyII")
      .def(py::init([](double theta, double k2, double k4, double k6) { return FamilyII{theta, k2, k4, k6}; }),
           py::arg("theta") = 0.0, py::arg("k2") = 0.0, py::arg("k4") = 0.0, py::arg("k6") = 0.0)
      .def_readwrite("theta", &FamilyII::theta)
      .def_readwrite("k2", &FamilyII::k2)
      .def_readwrite("k4", &FamilyII::k4)
      .def_readwrite("k6", &FamilyII::k6);
  py::class_<FamilyIII>(m, "FamilyIII")
      .def(py::init([](double l1, double l2, double l3, double l4, double k2) { return FamilyIII{l1, l2, l3, l4, k2}; }),
           py::arg("l1") = 0.0, py::arg("l2") = 0.0, py::arg("l3") = 0.0, py::arg("l4") = 0.0, py::arg("k2") = 0.0)
      .def_readwrite("l1", &FamilyIII::l1)
      .def_readwrite("l2", &FamilyIII::l2)
      .def_readwrite("l3", &FamilyIII::l3)
      .def_readwrite("l4", &FamilyIII::l4)
      .def_readwrite("k2", &FamilyIII::k2);

  py::class_<SpectrumRequest>(m, "SpectrumRequest")
      .def(py::init<>())
      .def_readwrite("pair", &SpectrumRequest::pair)
      .def_readwrite("case", &SpectrumRequest::case_tag)
      .def_readwrite("potential", &SpectrumRequest::potential)
      .def_readwrite("d", &SpectrumRequest::d_list)
      .def_readwrite("s", &SpectrumRequest::s_list)
      .def_readwrite("solve_for", &SpectrumRequest::solve_for)
      .def_readwrite("formulas", &SpectrumRequest::formulas)
      .def_readwrite("jobs", &SpectrumRequest::jobs);

  py::class_<SpectrumLine>(m, "SpectrumLine")
      .def_readonly("family", &SpectrumLine::family)
      .def_readonly("case", &SpectrumLine::case_tag)
      .def_readonly("d", &SpectrumLine::d)
      .def_readonly("s", &SpectrumLine::s)
      .def_readonly("branch", &SpectrumLine::branch)
      .def_readonly("quantized_name", &SpectrumLine::quantized_name)
      .def_readonly("quantized_value", &SpectrumLine::quantized_value)
      .def_readonly("field", &SpectrumLine::field)
      .def_readonly("E_rho", &SpectrumLine::E_rho)
      .def_readonly("nu", &SpectrumLine::nu)
      .def_readonly("mu", &SpectrumLine::mu)
      .def_readonly("real_branch", &SpectrumLine::real_branch)
      .def_readonly("normalizable", &SpectrumLine::normalizable)
      .def_readonly("nodes", &SpectrumLine::nodes)
      .def_readonly("poly", &SpectrumLine::poly)
      .def("__repr__", &repr_line<SpectrumLine>);

  py::class_<LineFailure>(m, "LineFailure")
      .def_readonly("d", &LineFailure::d)
      .def_readonly("s", &LineFailure::s)
      .def_readonly("branch", &LineFailure::branch)
      .def_readonly("message", &LineFailure::message);

  py::class_<SpectrumResult>(m, "SpectrumResult")
      .def_readonly("lines", &SpectrumResult::lines)
      .def_readonly("failures", &SpectrumResult::failures)
      .def_readonly("warnings", &SpectrumResult::warnings);

  m.def(
      "assemble_spectrum",
      [](const SpectrumRequest& req) {
        py::gil_scoped_release release;
        return assemble_spectrum(req);
      },
      py::arg("request"), "All solvable lines of the request, ascending in E_rho.");

  py::class_<OracleMatch>(m, "OracleMatch")
      .def_readonly("level_index", &OracleMatch::level_index)
      .def_readonly("oracle_energy", &OracleMatch::oracle_energy)
      .def_readonly("raw_gap", &OracleMatch::raw_gap)
      .def_readonly("extrapolated_gap", &OracleMatch::extrapolated_gap)
      .def_readonly("relative_gap", &OracleMatch::relative_gap);
  py::class_<OracleReport>(m, "OracleReport")
      .def_readonly("energies", &OracleReport::energies)
      .def_readonly("matched", &OracleReport::matched)
      .def_readonly("residual_max", &OracleReport::residual_max)
      .def_property_readonly("extrapolated", [](const OracleReport& r) { return r.grid_convergence.extrapolated; })
      .def_property_readonly("order", [](const OracleReport& r) { return r.grid_convergence.order; })
      .def_readonly("passed", &OracleReport::passed)
      .def_readonly("message", &OracleReport::message);

  m.def(
      "cross_validate",
      [](const SpectrumRequest& req, const SpectrumLine& line) {
        py::gil_scoped_release release;
        return cross_validate_line(req, line);
      },
      py::arg("request"), py::arg("line"), "Finite-difference check of one line.");

  m.def(
      "zeta",
      [](const SpectrumRequest& req, const SpectrumLine& line, const std::vector<double>& rho, bool normalized) {
        RadialWavefunction wf = line_wavefunction(req, line);
        double log_norm = 0.0;
        if (normalized) {
          wf = normalize(wf);
          log_norm = std::log(*wf.norm);
        }
        std::vector<double> out;
        out.reserve(rho.size());
        for (double r : rho) {
          const ZetaValue z = evaluate_zeta(wf, r);
          out.push_back(z.sign == 0 ? 0.0 : z.sign * std::exp(z.log_abs - log_norm));
        }
        return out;
      },
      py::arg("request"), py::arg("line"), py::arg("rho"), py::arg("normalized") = false);

  m.def(
      "block_matrix",
      [](Family family, int d, double beta, double xi, double gamma, double alpha) {
        return to_rows(make_block(family, d, beta, xi, gamma, alpha).matrix);
      },
      py::arg("family"), py::arg("d"), py::arg("beta"), py::arg("xi"), py::arg("gamma") = 0.0,
      py::arg("alpha") = 0.0);
  m.def(
      "block_eigenvalues",
      [](Family family, int d, double beta, double xi, double gamma, double alpha) {
        std::vector<std::complex<double>> out;
        for (const auto& b : block_eigenvalues(make_block(family, d, beta, xi, gamma, alpha))) out.push_back(b.mu);
        return out;
      },
      py::arg("family"), py::arg("d"), py::arg("beta"), py::arg("xi"), py::arg("gamma") = 0.0,
      py::arg("alpha") = 0.0);

  m.def(
      "commutator_defect",
      [](int n) {
        const Rational r = commutator_defect(RepSpace(n));
        return py::module_::import("fractions").attr("Fraction")(r.numerator(), r.denominator());
      },
      py::arg("n"));

  py::class_<RunConfig>(m, "RunConfig")
      .def_readwrite("request", &RunConfig::request)
      .def_property_readonly("oracle_enabled", [](const RunConfig& c) { return c.oracle.enabled; });
  m.def(
      "parse_config", [](const std::string& text) { return parse_config(text); }, py::arg("json_text"));

  m.def(
      "run",
      [](const std::string& command, const std::string& config_path, std::optional<int> jobs, bool paper_variants,
         std::optional<std::string> out, std::optional<std::string> format) {
        CliOptions o;
        o.jobs = jobs;
        o.paper_variants = paper_variants;
        o.out = out;
        if (format) o.format = parse_output_format(*format);
        std::ostringstream so, se;
        int code;
        {
          py::gil_scoped_release release;
          code = run_command(command, config_path, o, so, se);
        }
        return py::make_tuple(code, so.str(), se.str());
      },
      py::arg("command"), py::arg("config"), py::arg("jobs") = py::none(), py::arg("paper_variants") = false,
      py::arg("out") = py::none(), py::arg("format") = py::none(),
      "Runs a CLI command in-process; returns (exit_code, stdout, stderr).");
}

#include "qes/assemble.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <sstream>
#include <thread>
#include <tuple>

namespace qes {

std::string_view to_string(SolveFor s) {
  return s == SolveFor::Field ? "field" : "potential_param";
}

namespace {

struct CellOutput {
  std::vector<SpectrumLine> lines;
  std::vector<LineFailure> failures;
  std::vector<std::string> warnings;
};

/// Real part of the right eigenvector in r, leading coefficient 1. Complex
/// branches keep their real part so the line still carries a polynomial.
std::vector<double> line_polynomial(const QESBlock& block, const BranchEigen& branch) {
  if (branch.is_real) return polynomial_from_eigenvector(block, branch);
  const auto v = right_eigenvector(block, branch);
  std::vector<double> scaled;
  double ck = 1.0;
  for (const auto& x : v) {
    scaled.push_back(x.real() * ck);
    ck *= block.scaling_c;
  }
  const double lead = scaled.back() != 0.0 ? scaled.back() : 1.0;
  for (auto& x : scaled) x /= lead;
  if (block.variable_map == VariableMap::Identity) return scaled;
  std::vector<double> out(2 * scaled.size() - 1, 0.0);
  for (std::size_t k = 0; k < scaled.size(); ++k) out[2 * k] = scaled[k];
  return out;
}

SpectrumLine build_line(const SpectrumRequest& req, const DerivedConstants& consts, double f,
                        const PotentialSpec& pot, int s, int d, const BranchEigen& branch,
                        const QESBlock& block, const CouplingCase& cc) {
  SpectrumLine line;
  line.family = family_of(pot);
  line.case_tag = req.case_tag;
  line.d = d;
  line.s = s;
  line.branch = branch.branch_index;
  line.field = f;
  line.quantized_name = std::string(frequency_name(req.case_tag));
  line.quantized_value = f;
  line.mu = branch.mu.real() + 0.0;
  line.nu = branch.nu;
  line.real_branch = branch.is_real;
  line.normalizable = block.ansatz.normalizable;
  line.E_rho = relative_energy(block.ansatz, cc, consts, branch.mu.real(), req.formulas);
  line.poly = line_polynomial(block, branch);
  RadialWavefunction wf;
  wf.family = line.family;
  wf.ansatz = block.ansatz;
  wf.poly = line.poly;
  line.nodes = count_nodes(wf);
  return line;
}

void cell_family_one(const SpectrumRequest& req, const DerivedConstants& consts, const FamilyI& pot,
                     int s, int d, CellOutput& out) {
  const FieldSolution sol = solve_quantized_field_I(pot, consts, req.case_tag, s, d, req.field_options);
  for (const auto& w : sol.warnings) out.warnings.push_back(w);

  std::vector<FieldRoot> roots = sol.roots;
  if (!sol.degenerate_branches.empty()) {
    const double f = case_frequency(req.case_tag, consts);
    for (int b : sol.degenerate_branches) {
      if (f > 0.0) {
        roots.push_back({f, b});
        std::ostringstream msg;
        msg << "d=" << d << " s=" << s << " branch " << b
            << ": quantisation holds for every field; using the configured field " << f;
        out.warnings.push_back(msg.str());
      } else {
        out.failures.push_back({d, s, b, "quantisation holds for every field but the configured field is not positive"});
      }
    }
  }

  for (const auto& r : roots) {
    try {
      const CouplingCase cc = coupling_at_frequency(req.case_tag, consts, r.frequency);
      const AnsatzParams a = ansatz_params(pot, cc, consts, s, d);
      const QESBlock block = qes_block(a);
      const auto branches = block_eigenvalues(block);
      out.lines.push_back(build_line(req, consts, r.frequency, pot, s, d,
                                     branches[static_cast<std::size_t>(r.branch)], block, cc));
    } catch (const std::exception& e) {
      out.failures.push_back({d, s, r.branch, e.what()});
    }
  }
}

void cell_family_two(const SpectrumRequest& req, const DerivedConstants& consts, const FamilyII& pot,
                     int s, int d, CellOutput& out) {
  const auto f = solve_quantized_field_II(pot, consts, req.case_tag, s, d, req.formulas);
  if (!f) return;
  const CouplingCase cc = coupling_at_frequency(req.case_tag, consts, *f);
  const AnsatzParams a = ansatz_params(pot, cc, consts, s, d);
  const QESBlock block = qes_block(a);
  for (const auto& b : block_eigenvalues(block)) {
    try {
      out.lines.push_back(build_line(req, consts, *f, pot, s, d, b, block, cc));
    } catch (const std::exception& e) {
      out.failures.push_back({d, s, b.branch_index, e.what()});
    }
  }
}

void cell_family_three(const SpectrumRequest& req, const DerivedConstants& consts, const FamilyIII& pot,
                       int s, int d, CellOutput& out) {
  for (int b = 0; b <= d; ++b) {
    try {
      const ConstraintsIII c = solve_constraints_III(pot, consts, req.case_tag, s, d, b, req.formulas);
      FamilyIII solved = pot;
      solved.l2 = c.l2;
      const CouplingCase cc = coupling_at_frequency(req.case_tag, consts, c.frequency);
      const AnsatzParams a = ansatz_params(solved, cc, consts, s, d);
      const QESBlock block = qes_block(a);
      SpectrumLine line = build_line(req, consts, c.frequency, solved, s, d, c.branch, block, cc);
      line.quantized_name = "l2";
      line.quantized_value = c.l2;
      out.lines.push_back(std::move(line));
    } catch (const std::exception& e) {
      out.failures.push_back({d, s, b, e.what()});
    }
  }
}

CellOutput solve_cell(const SpectrumRequest& req, const DerivedConstants& consts, int s, int d) {
  CellOutput out;
  try {
    std::visit(
        [&](const auto& p) {
          using P = std::decay_t<decltype(p)>;
          if constexpr (std::is_same_v<P, FamilyI>) cell_family_one(req, consts, p, s, d, out);
          else if constexpr (std::is_same_v<P, FamilyII>) cell_family_two(req, consts, p, s, d, out);
          else cell_family_three(req, consts, p, s, d, out);
        },
        req.potential);
  } catch (const std::exception& e) {
    out.failures.push_back({d, s, -1, e.what()});
  }
  return out;
}

}  // namespace

SpectrumResult assemble_spectrum(const SpectrumRequest& req) {
  if (req.d_list.empty() || req.s_list.empty()) throw DomainError("assemble_spectrum: d and s lists must be nonempty");
  for (int d : req.d_list)
    if (d < 0) throw DomainError("assemble_spectrum: d must be >= 0");
  const Family fam = family_of(req.potential);
  if (req.solve_for == SolveFor::PotentialParam && fam != Family::III)
    throw DomainError("solve_for = potential_param is only available for Family III");
  if (req.solve_for == SolveFor::Field && fam == Family::III)
    throw DomainError("Family III fixes the field through k2; use solve_for = potential_param");

  const DerivedConstants consts = derive_constants(req.pair);
  effective_radial_problem(consts, req.case_tag);

  std::vector<std::pair<int, int>> cells;
  for (int d : req.d_list)
    for (int s : req.s_list) cells.emplace_back(d, s);

  std::vector<CellOutput> outputs(cells.size());
  std::atomic<std::size_t> next{0};
  const auto worker = [&] {
    for (std::size_t i = next++; i < cells.size(); i = next++)
      outputs[i] = solve_cell(req, consts, cells[i].second, cells[i].first);
  };
  const int jobs = std::clamp(req.jobs, 1, static_cast<int>(cells.size()));
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int j = 0; j < jobs; ++j) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  SpectrumResult res;
  for (auto& o : outputs) {
    res.lines.insert(res.lines.end(), o.lines.begin(), o.lines.end());
    res.failures.insert(res.failures.end(), o.failures.begin(), o.failures.end());
    res.warnings.insert(res.warnings.end(), o.warnings.begin(), o.warnings.end());
  }
  std::stable_sort(res.lines.begin(), res.lines.end(), [](const SpectrumLine& a, const SpectrumLine& b) {
    return std::tie(a.E_rho, a.d, a.s, a.branch, a.field) < std::tie(b.E_rho, b.d, b.s, b.branch, b.field);
  });
  return res;
}

void sort_for_output(std::vector<SpectrumLine>& lines) {
  std::stable_sort(lines.begin(), lines.end(), [](const SpectrumLine& a, const SpectrumLine& b) {
    return std::tie(a.family, a.d, a.s, a.branch, a.field) < std::tie(b.family, b.d, b.s, b.branch, b.field);
  });
}

// ---------------------------------------------------------------------------

LineContext line_context(const SpectrumRequest& req, const SpectrumLine& line) {
  LineContext ctx;
  ctx.consts = derive_constants(req.pair);
  ctx.coupling = coupling_at_frequency(line.case_tag, ctx.consts, line.field);
  ctx.potential = req.potential;
  if (auto* p = std::get_if<FamilyIII>(&ctx.potential)) p->l2 = line.quantized_value;
  ctx.ansatz = ansatz_params(ctx.potential, ctx.coupling, ctx.consts, line.s, line.d);
  return ctx;
}

RadialWavefunction line_wavefunction(const SpectrumRequest& req, const SpectrumLine& line) {
  const LineContext ctx = line_context(req, line);
  RadialWavefunction wf;
  wf.family = line.family;
  wf.ansatz = ctx.ansatz;
  wf.poly = line.poly;
  return wf;
}

RadialProblem line_problem(const SpectrumRequest& req, const SpectrumLine& line) {
  const LineContext ctx = line_context(req, line);
  RadialProblem p;
  p.potential = make_potential(ctx.potential);
  p.s = line.s;
  p.m_r = ctx.consts.m_r;
  p.lambda_rot = ctx.coupling.lambda_rot;
  p.lambda_conf = ctx.coupling.lambda_conf;
  return p;
}

double line_quantization_residual(const SpectrumRequest& req, const SpectrumLine& line) {
  const LineContext ctx = line_context(req, line);
  const auto& a = ctx.ansatz;
  const double m = ctx.consts.m_r;
  switch (line.family) {
    case Family::I: {
      const auto& pot = std::get<FamilyI>(req.potential);
      return quantization_residual_I(line.field, pot, ctx.consts, line.case_tag, line.s, line.d, line.branch);
    }
    case Family::II: {
      const auto& pot = std::get<FamilyII>(req.potential);
      const double xi_shift = req.formulas == FormulaSet::PaperPrinted ? 1.0 : 2.0;
      const double terms[] = {2.0 * m * ctx.coupling.lambda_conf, 4.0 * a.eta * a.eta,
                              -8.0 * a.tau * (a.xi + xi_shift), -16.0 * a.tau * line.d, -2.0 * m * pot.k2};
      double sum = terms[0];
      double scale = std::abs(terms[0]);
      for (int i = 1; i < 5; ++i) {
        sum -= terms[i];
        scale += std::abs(terms[i]);
      }
      return sum / std::max(scale, 1e-300);
    }
    case Family::III: {
      const auto branches = block_eigenvalues(qes_block(a));
      const double mu = branches[static_cast<std::size_t>(line.branch)].mu.real();
      const double eta_tau = req.formulas == FormulaSet::PaperPrinted ? -2.0 * a.eta * a.tau : 2.0 * a.eta * a.tau;
      const double lhs = 2.0 * line.quantized_value * m;
      const double rhs = a.xi * a.xi - eta_tau - static_cast<double>(line.s) * line.s - mu;
      const double scale = std::abs(lhs) + a.xi * a.xi + std::abs(eta_tau) +
                           static_cast<double>(line.s) * line.s + std::abs(mu);
      return (lhs - rhs) / std::max(scale, 1e-300);
    }
  }
  return 0.0;
}

OracleReport cross_validate_line(const SpectrumRequest& req, const SpectrumLine& line,
                                 const OracleOptions& options) {
  return cross_validate(line.E_rho, line_problem(req, line), line_wavefunction(req, line), options);
}

}  // namespace qes

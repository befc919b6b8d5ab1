#include "qes/cli.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include <unistd.h>

#include <json.hpp>

namespace qes {

using nlohmann::json;

const std::vector<std::string> kSpectrumColumns = {
    "family", "case",        "d",           "s",      "branch", "quantized_name", "quantized_value", "E_rho",
    "nu",     "mu",          "real_branch", "normalizable", "nodes",  "poly_coeffs",    "field"};

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

namespace {

std::string join_poly(const std::vector<double>& p) {
  std::string s;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (i) s += ';';
    s += format_double(p[i]);
  }
  return s;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

double parse_double(const std::string& s, const char* what) {
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size())
    throw std::invalid_argument(std::string("cannot parse ") + what + " '" + s + "'");
  return v;
}

int parse_int(const std::string& s, const char* what) {
  std::size_t pos = 0;
  const int v = std::stoi(s, &pos);
  if (pos != s.size()) throw std::invalid_argument(std::string("cannot parse ") + what + " '" + s + "'");
  return v;
}

bool parse_bool(const std::string& s, const char* what) {
  if (s == "true") return true;
  if (s == "false") return false;
  throw std::invalid_argument(std::string("cannot parse ") + what + " '" + s + "'");
}

json line_to_json(const SpectrumLine& l) {
  return json{{"family", to_string(l.family)},
              {"case", to_string(l.case_tag)},
              {"d", l.d},
              {"s", l.s},
              {"branch", l.branch},
              {"quantized_name", l.quantized_name},
              {"quantized_value", l.quantized_value},
              {"E_rho", l.E_rho},
              {"nu", l.nu},
              {"mu", l.mu},
              {"real_branch", l.real_branch},
              {"normalizable", l.normalizable},
              {"nodes", l.nodes},
              {"poly_coeffs", l.poly},
              {"field", l.field}};
}

std::string table(const std::vector<SpectrumLine>& lines) {
  std::ostringstream os;
  os << std::left << std::setw(7) << "family" << std::setw(9) << "case" << std::right << std::setw(4) << "d"
     << std::setw(4) << "s" << std::setw(7) << "branch" << "  " << std::left << std::setw(8) << "param"
     << std::right << std::setw(24) << "value" << std::setw(24) << "E_rho" << std::setw(7) << "nodes"
     << "  flags\n";
  os << std::setprecision(15);
  for (const auto& l : lines) {
    os << std::left << std::setw(7) << to_string(l.family) << std::setw(9) << to_string(l.case_tag) << std::right
       << std::setw(4) << l.d << std::setw(4) << l.s << std::setw(7) << l.branch << "  " << std::left
       << std::setw(8) << l.quantized_name << std::right << std::setw(24) << l.quantized_value << std::setw(24)
       << l.E_rho << std::setw(7) << l.nodes << "  " << (l.real_branch ? "" : "complex ")
       << (l.normalizable ? "" : "non-normalizable") << '\n';
  }
  return os.str();
}

void report_diagnostics(const SpectrumResult& res, std::ostream& err) {
  for (const auto& w : res.warnings) err << "warning: " << w << '\n';
  for (const auto& f : res.failures) {
    err << "line failure (d=" << f.d << ", s=" << f.s;
    if (f.branch >= 0) err << ", branch=" << f.branch;
    err << "): " << f.message << '\n';
  }
}

/// Routes a command's body to the configured file (plus a summary on `out`)
/// or straight to `out`.
void emit(const RunConfig& cfg, const std::string& body, const std::string& summary, std::ostream& out) {
  if (cfg.output.path.empty()) {
    out << body;
  } else {
    write_atomically(cfg.output.path, body);
    out << summary;
  }
}

SpectrumResult solve_sorted(const SpectrumRequest& req, std::ostream& err) {
  SpectrumResult res = assemble_spectrum(req);
  sort_for_output(res.lines);
  report_diagnostics(res, err);
  return res;
}

std::string optional_cell(const std::optional<double>& v) { return v ? format_double(*v) : ""; }

}  // namespace

void write_spectrum_csv(std::ostream& os, const std::vector<SpectrumLine>& lines) {
  for (std::size_t i = 0; i < kSpectrumColumns.size(); ++i) os << (i ? "," : "") << kSpectrumColumns[i];
  os << '\n';
  for (const auto& l : lines) {
    os << to_string(l.family) << ',' << to_string(l.case_tag) << ',' << l.d << ',' << l.s << ',' << l.branch << ','
       << l.quantized_name << ',' << format_double(l.quantized_value) << ',' << format_double(l.E_rho) << ','
       << format_double(l.nu) << ',' << format_double(l.mu) << ',' << (l.real_branch ? "true" : "false") << ','
       << (l.normalizable ? "true" : "false") << ',' << l.nodes << ',' << join_poly(l.poly) << ','
       << format_double(l.field) << '\n';
  }
}

void write_spectrum_json(std::ostream& os, const std::vector<SpectrumLine>& lines) {
  json arr = json::array();
  for (const auto& l : lines) arr.push_back(line_to_json(l));
  os << arr.dump(2) << '\n';
}

std::vector<SpectrumLine> read_spectrum_csv(std::istream& is) {
  std::string header;
  if (!std::getline(is, header)) throw std::invalid_argument("spectrum CSV: missing header");
  const auto cols = split(header, ',');
  if (cols != kSpectrumColumns) throw std::invalid_argument("spectrum CSV: unexpected header '" + header + "'");
  std::vector<SpectrumLine> out;
  std::string row;
  while (std::getline(is, row)) {
    if (row.empty() || row == "\r") continue;
    const auto c = split(row, ',');
    if (c.size() != cols.size()) throw std::invalid_argument("spectrum CSV: wrong column count in '" + row + "'");
    SpectrumLine l;
    l.family = parse_family(c[0]);
    l.case_tag = parse_case_tag(c[1]);
    l.d = parse_int(c[2], "d");
    l.s = parse_int(c[3], "s");
    l.branch = parse_int(c[4], "branch");
    l.quantized_name = c[5];
    l.quantized_value = parse_double(c[6], "quantized_value");
    l.E_rho = parse_double(c[7], "E_rho");
    l.nu = parse_double(c[8], "nu");
    l.mu = parse_double(c[9], "mu");
    l.real_branch = parse_bool(c[10], "real_branch");
    l.normalizable = parse_bool(c[11], "normalizable");
    l.nodes = parse_int(c[12], "nodes");
    if (!c[13].empty())
      for (const auto& x : split(c[13], ';')) l.poly.push_back(parse_double(x, "poly coefficient"));
    l.field = parse_double(c[14], "field");
    out.push_back(std::move(l));
  }
  return out;
}

std::vector<SpectrumLine> read_spectrum_json(std::istream& is) {
  const json arr = json::parse(is);
  std::vector<SpectrumLine> out;
  for (const auto& j : arr) {
    SpectrumLine l;
    l.family = parse_family(j.at("family").get<std::string>());
    l.case_tag = parse_case_tag(j.at("case").get<std::string>());
    l.d = j.at("d").get<int>();
    l.s = j.at("s").get<int>();
    l.branch = j.at("branch").get<int>();
    l.quantized_name = j.at("quantized_name").get<std::string>();
    l.quantized_value = j.at("quantized_value").get<double>();
    l.E_rho = j.at("E_rho").get<double>();
    l.nu = j.at("nu").get<double>();
    l.mu = j.at("mu").get<double>();
    l.real_branch = j.at("real_branch").get<bool>();
    l.normalizable = j.at("normalizable").get<bool>();
    l.nodes = j.at("nodes").get<int>();
    l.poly = j.at("poly_coeffs").get<std::vector<double>>();
    l.field = j.at("field").get<double>();
    out.push_back(std::move(l));
  }
  return out;
}

void write_atomically(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  fs::path target(path);
  std::error_code st_ec;
  const auto st = fs::status(target, st_ec);
  if (fs::exists(st) && !fs::is_regular_file(st)) {
    // devices and pipes cannot be replaced by a rename
    std::ofstream f(target, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open '" + path + "' for writing");
    f << content;
    f.flush();
    if (!f) throw std::runtime_error("write to '" + path + "' failed");
    return;
  }
  if (fs::is_symlink(fs::symlink_status(target, st_ec))) target = fs::canonical(target);
  fs::path tmp = target;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("cannot open '" + tmp.string() + "' for writing");
    f << content;
    f.flush();
    if (!f) {
      f.close();
      fs::remove(tmp);
      throw std::runtime_error("write to '" + tmp.string() + "' failed");
    }
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp);
    throw std::runtime_error("cannot rename onto '" + path + "': " + ec.message());
  }
}

void apply_overrides(RunConfig& cfg, const CliOptions& o) {
  if (o.jobs) cfg.request.jobs = *o.jobs;
  if (o.paper_variants) cfg.request.formulas = FormulaSet::PaperPrinted;
  if (o.out) cfg.output.path = *o.out;
  if (o.format) cfg.output.format = *o.format;
}

// ---------------------------------------------------------------------------

int run_solve(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const SpectrumResult res = solve_sorted(cfg.request, err);
  std::ostringstream body;
  if (cfg.output.format == OutputFormat::Csv) write_spectrum_csv(body, res.lines);
  else write_spectrum_json(body, res.lines);
  emit(cfg, body.str(), table(res.lines), out);
  if (res.lines.empty()) {
    err << "empty admissible set: no solvable line for this configuration\n";
    return kExitEmpty;
  }
  return kExitOk;
}

int run_verify(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const SpectrumResult res = solve_sorted(cfg.request, err);

  struct Row {
    const SpectrumLine* line;
    std::string status;
    std::optional<double> oracle_e, raw_gap, gap, rel_gap, residual, order;
    std::string note;
  };
  std::vector<Row> rows;
  bool all_pass = true;
  for (const auto& l : res.lines) {
    Row r{&l, "", {}, {}, {}, {}, {}, {}, ""};
    if (!cfg.oracle.enabled) {
      r.status = "unverified";
    } else if (!l.real_branch || !l.normalizable) {
      r.status = "skipped";
      r.note = !l.real_branch ? "complex branch" : "not normalisable";
    } else {
      try {
        const OracleReport rep = cross_validate_line(cfg.request, l, cfg.oracle.options);
        r.residual = rep.residual_max;
        r.order = rep.grid_convergence.order;
        if (rep.matched) {
          r.oracle_e = rep.grid_convergence.extrapolated;
          r.raw_gap = rep.matched->raw_gap;
          r.gap = rep.matched->extrapolated_gap;
          r.rel_gap = rep.matched->relative_gap;
        }
        r.status = rep.passed ? "pass" : "fail";
        r.note = rep.message;
      } catch (const std::exception& e) {
        r.status = "fail";
        r.note = e.what();
      }
      all_pass = all_pass && r.status == "pass";
    }
    rows.push_back(std::move(r));
  }

  std::ostringstream body;
  if (cfg.output.format == OutputFormat::Csv) {
    body << "family,case,d,s,branch,quantized_name,quantized_value,E_rho,oracle_E,raw_gap,extrapolated_gap,"
            "relative_gap,residual,order,status\n";
    for (const auto& r : rows) {
      const auto& l = *r.line;
      body << to_string(l.family) << ',' << to_string(l.case_tag) << ',' << l.d << ',' << l.s << ',' << l.branch
           << ',' << l.quantized_name << ',' << format_double(l.quantized_value) << ',' << format_double(l.E_rho)
           << ',' << optional_cell(r.oracle_e) << ',' << optional_cell(r.raw_gap) << ',' << optional_cell(r.gap)
           << ',' << optional_cell(r.rel_gap) << ',' << optional_cell(r.residual) << ','
           << optional_cell(r.order) << ',' << r.status << '\n';
    }
  } else {
    json arr = json::array();
    const auto opt = [](const std::optional<double>& v) { return v ? json(*v) : json(nullptr); };
    for (const auto& r : rows) {
      json j = line_to_json(*r.line);
      j["oracle_E"] = opt(r.oracle_e);
      j["raw_gap"] = opt(r.raw_gap);
      j["extrapolated_gap"] = opt(r.gap);
      j["relative_gap"] = opt(r.rel_gap);
      j["residual"] = opt(r.residual);
      j["order"] = opt(r.order);
      j["status"] = r.status;
      j["note"] = r.note;
      arr.push_back(std::move(j));
    }
    body << arr.dump(2) << '\n';
  }

  std::ostringstream summary;
  for (const auto& r : rows) {
    const auto& l = *r.line;
    summary << r.status << "  " << to_string(l.family) << " d=" << l.d << " s=" << l.s << " branch=" << l.branch
            << " E_rho=" << format_double(l.E_rho);
    if (!r.note.empty()) summary << "  " << r.note;
    summary << '\n';
  }
  emit(cfg, body.str(), summary.str(), out);
  for (const auto& r : rows)
    if (r.status == "fail") err << "verification failed: d=" << r.line->d << " s=" << r.line->s
                                << " branch=" << r.line->branch << ": " << r.note << '\n';
  if (res.lines.empty()) {
    err << "empty admissible set: nothing to verify\n";
    return kExitEmpty;
  }
  return all_pass ? kExitOk : kExitError;
}

int run_scan(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  if (!cfg.scan) throw ConfigError("scan", "missing required section for the scan command");
  const ScanConfig& sc = *cfg.scan;
  if (sc.steps == 0) {
    RunConfig single = cfg;
    single.request = with_parameter(cfg.request, sc.parameter, sc.from);
    return run_solve(single, out, err);
  }

  struct Row {
    double value;
    int d, s, branch;
    const SpectrumLine* line;
  };
  std::vector<SpectrumResult> results;
  std::vector<double> values;
  results.reserve(static_cast<std::size_t>(sc.steps + 1));
  for (int i = 0; i <= sc.steps; ++i) {
    const double v = sc.from + (sc.to - sc.from) * i / sc.steps;
    values.push_back(v);
    results.push_back(solve_sorted(with_parameter(cfg.request, sc.parameter, v), err));
  }

  std::vector<Row> rows;
  bool any = false;
  for (std::size_t i = 0; i < values.size(); ++i) {
    for (int d : cfg.request.d_list)
      for (int s : cfg.request.s_list)
        for (int b = 0; b <= d; ++b) {
          bool found = false;
          for (const auto& l : results[i].lines)
            if (l.d == d && l.s == s && l.branch == b) {
              rows.push_back({values[i], d, s, b, &l});
              found = any = true;
            }
          if (!found) rows.push_back({values[i], d, s, b, nullptr});
        }
  }

  std::ostringstream body;
  if (cfg.output.format == OutputFormat::Csv) {
    body << sc.parameter << ",d,s,branch,quantized_name,quantized_value,field,E_rho,nodes\n";
    for (const auto& r : rows) {
      body << format_double(r.value) << ',' << r.d << ',' << r.s << ',' << r.branch << ',';
      if (r.line)
        body << r.line->quantized_name << ',' << format_double(r.line->quantized_value) << ','
             << format_double(r.line->field) << ',' << format_double(r.line->E_rho) << ',' << r.line->nodes;
      else
        body << ",,,,";
      body << '\n';
    }
  } else {
    json arr = json::array();
    for (const auto& r : rows) {
      json j{{sc.parameter, r.value}, {"d", r.d}, {"s", r.s}, {"branch", r.branch}};
      j["quantized_name"] = r.line ? json(r.line->quantized_name) : json(nullptr);
      j["quantized_value"] = r.line ? json(r.line->quantized_value) : json(nullptr);
      j["field"] = r.line ? json(r.line->field) : json(nullptr);
      j["E_rho"] = r.line ? json(r.line->E_rho) : json(nullptr);
      j["nodes"] = r.line ? json(r.line->nodes) : json(nullptr);
      arr.push_back(std::move(j));
    }
    body << arr.dump(2) << '\n';
  }
  std::ostringstream summary;
  summary << rows.size() << " scan rows over " << values.size() << " values of " << sc.parameter << " written to "
          << cfg.output.path << '\n';
  emit(cfg, body.str(), summary.str(), out);
  if (!any) {
    err << "empty admissible set across the whole scan\n";
    return kExitEmpty;
  }
  return kExitOk;
}

int run_export(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  if (!cfg.export_) throw ConfigError("export", "missing required section for the export command");
  const ExportConfig& ec = *cfg.export_;
  const SpectrumResult res = solve_sorted(cfg.request, err);

  std::vector<const SpectrumLine*> matches;
  for (const auto& l : res.lines)
    if (l.d == ec.d && l.s == ec.s && l.branch == ec.branch) matches.push_back(&l);
  if (ec.root < 0 || static_cast<std::size_t>(ec.root) >= matches.size()) {
    std::ostringstream msg;
    msg << "export selector matches no line (d=" << ec.d << ", s=" << ec.s << ", branch=" << ec.branch
        << ", root=" << ec.root << "; " << matches.size() << " candidate(s))";
    throw std::invalid_argument(msg.str());
  }
  const SpectrumLine& line = *matches[static_cast<std::size_t>(ec.root)];
  RadialWavefunction wf = line_wavefunction(cfg.request, line);
  std::optional<double> log_norm;
  if (wf.ansatz.normalizable) {
    wf = normalize(wf);
    log_norm = std::log(*wf.norm);
  }

  std::vector<double> rho;
  for (int i = 0; i < ec.points; ++i) {
    const double t = static_cast<double>(i) / (ec.points - 1);
    rho.push_back(ec.spacing == ExportSpacing::Linear ? ec.rho_min + (ec.rho_max - ec.rho_min) * t
                                                       : ec.rho_min * std::pow(ec.rho_max / ec.rho_min, t));
  }

  std::ostringstream body;
  json arr = json::array();
  if (cfg.output.format == OutputFormat::Csv) body << "rho,zeta,zeta_normalized,exponent_log\n";
  for (double r : rho) {
    const ZetaValue z = evaluate_zeta(wf, r);
    std::optional<double> zn;
    if (log_norm) zn = z.sign == 0 ? 0.0 : z.sign * std::exp(z.log_abs - *log_norm);
    if (cfg.output.format == OutputFormat::Csv) {
      body << format_double(r) << ',' << format_double(z.value) << ',' << optional_cell(zn) << ','
           << format_double(z.log_abs) << '\n';
    } else {
      arr.push_back(json{{"rho", r},
                         {"zeta", z.value},
                         {"zeta_normalized", zn ? json(*zn) : json(nullptr)},
                         {"exponent_log", std::isfinite(z.log_abs) ? json(z.log_abs) : json(nullptr)}});
    }
  }
  if (cfg.output.format == OutputFormat::Json) body << arr.dump(2) << '\n';

  std::ostringstream summary;
  summary << "exported " << rho.size() << " samples of Family " << to_string(line.family) << " d=" << line.d
          << " s=" << line.s << " branch=" << line.branch << " (E_rho=" << format_double(line.E_rho) << ") to "
          << cfg.output.path << '\n';
  emit(cfg, body.str(), summary.str(), out);
  return kExitOk;
}

int run_command(const std::string& command, const std::string& config_path, const CliOptions& options,
                std::ostream& out, std::ostream& err) {
  try {
    RunConfig cfg = load_config(config_path);
    apply_overrides(cfg, options);
    if (command == "solve") return run_solve(cfg, out, err);
    if (command == "verify") return run_verify(cfg, out, err);
    if (command == "scan") return run_scan(cfg, out, err);
    if (command == "export") return run_export(cfg, out, err);
    err << "error: unknown command '" << command << "'\n";
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
  }
  return kExitError;
}

}  // namespace qes

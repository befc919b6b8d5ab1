#include "qes/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace qes {

using nlohmann::json;

namespace {

std::string join(const std::string& prefix, const std::string& key) {
  return prefix.empty() ? key : prefix + "." + key;
}

void reject_unknown(const json& obj, const std::string& prefix, const std::set<std::string>& known) {
  for (auto it = obj.begin(); it != obj.end(); ++it)
    if (!known.count(it.key())) throw ConfigError(join(prefix, it.key()), "unknown key");
}

const json& require_object(const json& parent, const std::string& key, const std::string& prefix) {
  const std::string path = join(prefix, key);
  if (!parent.contains(key)) throw ConfigError(path, "missing required section");
  const json& v = parent.at(key);
  if (!v.is_object()) throw ConfigError(path, "expected an object");
  return v;
}

double to_number(const json& v, const std::string& path) {
  if (!v.is_number()) throw ConfigError(path, "expected a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) throw ConfigError(path, "must be finite");
  return x;
}

double number(const json& obj, const std::string& key, const std::string& prefix) {
  if (!obj.contains(key)) throw ConfigError(join(prefix, key), "missing required key");
  return to_number(obj.at(key), join(prefix, key));
}

double number_or(const json& obj, const std::string& key, const std::string& prefix, double fallback) {
  return obj.contains(key) ? to_number(obj.at(key), join(prefix, key)) : fallback;
}

int to_int(const json& v, const std::string& path) {
  if (!v.is_number_integer()) throw ConfigError(path, "expected an integer");
  return v.get<int>();
}

int int_or(const json& obj, const std::string& key, const std::string& prefix, int fallback) {
  return obj.contains(key) ? to_int(obj.at(key), join(prefix, key)) : fallback;
}

std::string string_or(const json& obj, const std::string& key, const std::string& prefix, std::string fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_string()) throw ConfigError(join(prefix, key), "expected a string");
  return v.get<std::string>();
}

std::vector<int> int_list(const json& root, const std::string& key) {
  if (!root.contains(key)) throw ConfigError(key, "missing required key");
  const json& v = root.at(key);
  std::vector<int> out;
  if (v.is_array()) {
    for (std::size_t i = 0; i < v.size(); ++i)
      out.push_back(to_int(v[i], key + "[" + std::to_string(i) + "]"));
  } else {
    out.push_back(to_int(v, key));
  }
  if (out.empty()) throw ConfigError(key, "list must be nonempty");
  return out;
}

ParticlePair parse_pair(const json& root) {
  const json& p = require_object(root, "pair", "");
  reject_unknown(p, "pair", {"m1", "m2", "e1", "e2", "B"});
  ParticlePair pair;
  pair.m1 = number(p, "m1", "pair");
  pair.m2 = number(p, "m2", "pair");
  pair.e1 = number(p, "e1", "pair");
  pair.e2 = number(p, "e2", "pair");
  pair.B = number_or(p, "B", "pair", 0.0);
  if (!(pair.m1 > 0.0)) throw ConfigError("pair.m1", "mass must be positive");
  if (!(pair.m2 > 0.0)) throw ConfigError("pair.m2", "mass must be positive");
  return pair;
}

PotentialSpec parse_potential(const json& root, const ParticlePair& pair) {
  const json& p = require_object(root, "potential", "");
  const std::string pre = "potential";
  if (!p.contains("family")) throw ConfigError("potential.family", "missing required key");
  Family fam;
  try {
    fam = parse_family(string_or(p, "family", pre, ""));
  } catch (const std::exception& e) {
    throw ConfigError("potential.family", e.what());
  }
  switch (fam) {
    case Family::I: {
      reject_unknown(p, pre, {"family", "g_c", "theta", "k1", "k2"});
      FamilyI v;
      v.g_c = number_or(p, "g_c", pre, pair.e1 * pair.e2);
      v.theta = number_or(p, "theta", pre, 0.0);
      v.k1 = number_or(p, "k1", pre, 0.0);
      v.k2 = number_or(p, "k2", pre, 0.0);
      return v;
    }
    case Family::II: {
      reject_unknown(p, pre, {"family", "theta", "k2", "k4", "k6"});
      FamilyII v;
      v.theta = number_or(p, "theta", pre, 0.0);
      v.k2 = number_or(p, "k2", pre, 0.0);
      v.k4 = number_or(p, "k4", pre, 0.0);
      v.k6 = number(p, "k6", pre);
      if (!(v.k6 > 0.0)) throw ConfigError("potential.k6", "must be positive");
      return v;
    }
    case Family::III: {
      reject_unknown(p, pre, {"family", "l1", "l2", "l3", "l4", "k2"});
      FamilyIII v;
      v.l1 = number_or(p, "l1", pre, 0.0);
      v.l2 = number_or(p, "l2", pre, 0.0);
      v.l3 = number_or(p, "l3", pre, 0.0);
      v.l4 = number(p, "l4", pre);
      v.k2 = number(p, "k2", pre);
      if (!(v.l4 > 0.0)) throw ConfigError("potential.l4", "must be positive");
      if (!(v.k2 > 0.0)) throw ConfigError("potential.k2", "must be positive (it fixes the field)");
      return v;
    }
  }
  throw ConfigError("potential.family", "unknown family");
}

OracleConfig parse_oracle(const json& root) {
  OracleConfig oc;
  if (!root.contains("oracle")) return oc;
  const json& o = require_object(root, "oracle", "");
  reject_unknown(o, "oracle", {"enabled", "points", "rho_min", "rho_max", "spacing"});
  if (o.contains("enabled")) {
    if (!o.at("enabled").is_boolean()) throw ConfigError("oracle.enabled", "expected true or false");
    oc.enabled = o.at("enabled").get<bool>();
  }
  oc.options.base_points = int_or(o, "points", "oracle", oc.options.base_points);
  if (oc.options.base_points < 64) throw ConfigError("oracle.points", "must be at least 64");
  if (o.contains("rho_min")) oc.options.rho_min = number(o, "rho_min", "oracle");
  if (o.contains("rho_max")) oc.options.rho_max = number(o, "rho_max", "oracle");
  if (oc.options.rho_min && !(*oc.options.rho_min > 0.0)) throw ConfigError("oracle.rho_min", "must be positive");
  if (oc.options.rho_min && oc.options.rho_max && !(*oc.options.rho_max > *oc.options.rho_min))
    throw ConfigError("oracle.rho_max", "must exceed rho_min");
  const std::string sp = string_or(o, "spacing", "oracle", "log");
  if (sp == "log") oc.options.spacing = Spacing::LogUniform;
  else if (sp == "uniform") oc.options.spacing = Spacing::Uniform;
  else throw ConfigError("oracle.spacing", "expected \"log\" or \"uniform\"");
  return oc;
}

std::optional<ScanConfig> parse_scan(const json& root) {
  if (!root.contains("scan")) return std::nullopt;
  const json& s = require_object(root, "scan", "");
  reject_unknown(s, "scan", {"parameter", "from", "to", "steps"});
  ScanConfig sc;
  if (!s.contains("parameter")) throw ConfigError("scan.parameter", "missing required key");
  sc.parameter = string_or(s, "parameter", "scan", "");
  sc.from = number(s, "from", "scan");
  sc.to = number_or(s, "to", "scan", sc.from);
  sc.steps = int_or(s, "steps", "scan", 0);
  if (sc.steps < 0) throw ConfigError("scan.steps", "must be >= 0");
  return sc;
}

std::optional<ExportConfig> parse_export(const json& root) {
  if (!root.contains("export")) return std::nullopt;
  const json& e = require_object(root, "export", "");
  reject_unknown(e, "export", {"d", "s", "branch", "root", "rho_min", "rho_max", "points", "spacing"});
  ExportConfig ec;
  ec.d = int_or(e, "d", "export", ec.d);
  ec.s = int_or(e, "s", "export", ec.s);
  ec.branch = int_or(e, "branch", "export", ec.branch);
  ec.root = int_or(e, "root", "export", ec.root);
  ec.rho_min = number_or(e, "rho_min", "export", ec.rho_min);
  ec.rho_max = number_or(e, "rho_max", "export", ec.rho_max);
  ec.points = int_or(e, "points", "export", ec.points);
  if (!(ec.rho_min > 0.0)) throw ConfigError("export.rho_min", "must be positive");
  if (!(ec.rho_max > ec.rho_min)) throw ConfigError("export.rho_max", "must exceed rho_min");
  if (ec.points < 2) throw ConfigError("export.points", "must be at least 2");
  const std::string sp = string_or(e, "spacing", "export", "linear");
  if (sp == "linear") ec.spacing = ExportSpacing::Linear;
  else if (sp == "log") ec.spacing = ExportSpacing::Log;
  else throw ConfigError("export.spacing", "expected \"linear\" or \"log\"");
  return ec;
}

OutputConfig parse_output(const json& root) {
  OutputConfig out;
  if (!root.contains("output")) return out;
  const json& o = require_object(root, "output", "");
  reject_unknown(o, "output", {"path", "format"});
  out.path = string_or(o, "path", "output", "");
  try {
    out.format = parse_output_format(string_or(o, "format", "output", "csv"));
  } catch (const std::exception& e) {
    throw ConfigError("output.format", e.what());
  }
  return out;
}

}  // namespace

OutputFormat parse_output_format(std::string_view name) {
  if (name == "csv") return OutputFormat::Csv;
  if (name == "json") return OutputFormat::Json;
  throw std::invalid_argument("unknown output format '" + std::string(name) + "' (csv or json)");
}

RunConfig parse_config(std::string_view text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError("<root>", std::string("malformed JSON: ") + e.what());
  }
  if (!root.is_object()) throw ConfigError("<root>", "expected a JSON object");
  reject_unknown(root, "", {"pair", "case", "potential", "d", "s", "solve_for", "jobs", "oracle", "scan",
                            "export", "output"});

  RunConfig cfg;
  SpectrumRequest& req = cfg.request;
  req.pair = parse_pair(root);
  try {
    req.case_tag = parse_case_tag(string_or(root, "case", "", "charged"));
  } catch (const std::exception& e) {
    throw ConfigError("case", e.what());
  }
  req.potential = parse_potential(root, req.pair);
  req.d_list = int_list(root, "d");
  req.s_list = int_list(root, "s");
  for (std::size_t i = 0; i < req.d_list.size(); ++i)
    if (req.d_list[i] < 0) throw ConfigError("d[" + std::to_string(i) + "]", "must be >= 0");

  const Family fam = family_of(req.potential);
  const std::string solve_for = string_or(root, "solve_for", "", fam == Family::III ? "l2" : "field");
  if (solve_for == "field") req.solve_for = SolveFor::Field;
  else if (solve_for == "l2" || solve_for == "potential_param") req.solve_for = SolveFor::PotentialParam;
  else throw ConfigError("solve_for", "expected \"field\" or \"l2\"");
  if (req.solve_for == SolveFor::PotentialParam && fam != Family::III)
    throw ConfigError("solve_for", "solving for a potential coefficient is only available for Family III");
  if (req.solve_for == SolveFor::Field && fam == Family::III)
    throw ConfigError("solve_for", "Family III fixes the field through k2; use \"l2\"");

  req.jobs = int_or(root, "jobs", "", 1);
  if (req.jobs < 1) throw ConfigError("jobs", "must be >= 1");

  // Admissibility of the chosen case is part of the configuration contract.
  try {
    effective_radial_problem(derive_constants(req.pair), req.case_tag);
  } catch (const AdmissibilityError& e) {
    throw ConfigError("case", e.what());
  }

  cfg.oracle = parse_oracle(root);
  cfg.scan = parse_scan(root);
  if (cfg.scan) with_parameter(req, cfg.scan->parameter, cfg.scan->from);
  cfg.export_ = parse_export(root);
  cfg.output = parse_output(root);
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("<file>", "cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

SpectrumRequest with_parameter(const SpectrumRequest& request, const std::string& name, double value) {
  SpectrumRequest out = request;
  const auto fail = [&]() -> double& {
    throw ConfigError("scan.parameter", "'" + name + "' is not a coefficient of Family " +
                                            std::string(to_string(family_of(request.potential))));
  };
  double& slot = std::visit(
      [&](auto& p) -> double& {
        using P = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<P, FamilyI>) {
          if (name == "g_c") return p.g_c;
          if (name == "theta") return p.theta;
          if (name == "k1") return p.k1;
          if (name == "k2") return p.k2;
        } else if constexpr (std::is_same_v<P, FamilyII>) {
          if (name == "theta") return p.theta;
          if (name == "k2") return p.k2;
          if (name == "k4") return p.k4;
          if (name == "k6") return p.k6;
        } else {
          if (name == "l1") return p.l1;
          if (name == "l3") return p.l3;
          if (name == "l4") return p.l4;
          if (name == "k2") return p.k2;
        }
        return fail();
      },
      out.potential);
  slot = value;
  return out;
}

}  // namespace qes

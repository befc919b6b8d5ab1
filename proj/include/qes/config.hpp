#pragma once

// Run configuration read from a JSON file.

#include <optional>
#include <stdexcept>
#include <string>

#include "qes/assemble.hpp"
#include "qes/oracle.hpp"

namespace qes {

/// Configuration error carrying the dotted path of the offending key.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string key_path, const std::string& what)
      : std::runtime_error(key_path + ": " + what), key_path_(std::move(key_path)) {}
  const std::string& key_path() const { return key_path_; }

 private:
  std::string key_path_;
};

struct OracleConfig {
  bool enabled = true;
  OracleOptions options;
};

struct ScanConfig {
  std::string parameter;
  double from = 0.0;
  double to = 0.0;
  int steps = 0;
};

enum class ExportSpacing { Linear, Log };

struct ExportConfig {
  int d = 0;
  int s = 0;
  int branch = 0;
  int root = 0;  // index among lines sharing (d, s, branch), ascending field
  double rho_min = 0.01;
  double rho_max = 5.0;
  int points = 200;
  ExportSpacing spacing = ExportSpacing::Linear;
};

enum class OutputFormat { Csv, Json };

struct OutputConfig {
  std::string path;  // empty: standard output
  OutputFormat format = OutputFormat::Csv;
};

struct RunConfig {
  SpectrumRequest request;
  OracleConfig oracle;
  std::optional<ScanConfig> scan;
  std::optional<ExportConfig> export_;
  OutputConfig output;
};

/// Throws ConfigError.
RunConfig parse_config(std::string_view json_text);
RunConfig load_config(const std::string& path);

OutputFormat parse_output_format(std::string_view name);

/// Copy of the request with one potential coefficient replaced.
/// Throws ConfigError if the family has no such coefficient.
SpectrumRequest with_parameter(const SpectrumRequest& request, const std::string& name, double value);

}  // namespace qes

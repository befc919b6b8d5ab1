#pragma once

// solve / verify / scan / export commands and spectrum (de)serialisation.

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "qes/config.hpp"

namespace qes {

enum ExitCode : int { kExitOk = 0, kExitError = 1, kExitEmpty = 2 };

struct CliOptions {
  std::optional<int> jobs;
  bool paper_variants = false;
  std::optional<std::string> out;
  std::optional<OutputFormat> format;
};

/// Command-line flags take precedence over the file.
void apply_overrides(RunConfig& config, const CliOptions& options);

/// Each command writes its result to config.output.path (atomically) or, when
/// no path is set, to `out`; diagnostics go to `err`. Returns an ExitCode.
int run_solve(const RunConfig& config, std::ostream& out, std::ostream& err);
int run_verify(const RunConfig& config, std::ostream& out, std::ostream& err);
int run_scan(const RunConfig& config, std::ostream& out, std::ostream& err);
int run_export(const RunConfig& config, std::ostream& out, std::ostream& err);

/// Loads the config, applies overrides and dispatches; maps every exception
/// to kExitError with a message on `err`.
int run_command(const std::string& command, const std::string& config_path, const CliOptions& options,
                std::ostream& out, std::ostream& err);

/// 17 significant digits.
std::string format_double(double x);

extern const std::vector<std::string> kSpectrumColumns;

void write_spectrum_csv(std::ostream& os, const std::vector<SpectrumLine>& lines);
void write_spectrum_json(std::ostream& os, const std::vector<SpectrumLine>& lines);
std::vector<SpectrumLine> read_spectrum_csv(std::istream& is);
std::vector<SpectrumLine> read_spectrum_json(std::istream& is);

/// Writes to a sibling temporary file and renames it over `path`.
void write_atomically(const std::string& path, const std::string& content);

}  // namespace qes

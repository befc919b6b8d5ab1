#include <iostream>

#include <CLI11.hpp>

#include "qes/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Quasi-exactly solvable levels of two charges on a plane in a magnetic field"};
  app.require_subcommand(1);

  std::string config;
  qes::CliOptions options;
  int jobs = 0;
  std::string out;
  std::string format;

  for (const char* name : {"solve", "verify", "scan", "export"}) {
    auto* sub = app.add_subcommand(name);
    sub->add_option("--config", config, "JSON configuration file")->required()->check(CLI::ExistingFile);
    sub->add_option("--jobs", jobs, "worker threads for (d, s) cells")->check(CLI::PositiveNumber);
    sub->add_flag("--debug-paper-variants", options.paper_variants,
                  "use the printed closed forms where they differ from coefficient matching");
    sub->add_option("--out", out, "output path (default: standard output)");
    sub->add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? qes::kExitOk : qes::kExitError;
  }

  if (jobs > 0) options.jobs = jobs;
  if (!out.empty()) options.out = out;
  if (!format.empty()) options.format = qes::parse_output_format(format);
  return qes::run_command(app.get_subcommands().front()->get_name(), config, options, std::cout, std::cerr);
}

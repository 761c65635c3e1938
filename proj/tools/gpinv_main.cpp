#include <CLI11.hpp>

#include <iostream>
#include <map>

#include "gpinv/commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Finite-section Moore-Penrose inverse experiments", "gpinv"};
  app.set_version_flag("--version", GPINV_VERSION);
  app.require_subcommand(1);

  std::string filter;
  auto* gallery = app.add_subcommand("gallery", "List the built-in models");
  gallery->add_option("filter", filter, "Substring of the model name or kind");

  std::string config_path;
  std::string suite;
  gpinv::CommandOptions options;
  const std::map<std::string, gpinv::ReportFormat> formats{{"csv", gpinv::ReportFormat::Csv},
                                                           {"json", gpinv::ReportFormat::Json}};

  auto* run = app.add_subcommand("run", "Run the finite-section scheme and classify it");
  auto* check = app.add_subcommand("check", "Run a diagnostic suite");
  for (auto* sub : {run, check}) {
    sub->add_option("config", config_path, "Experiment config file")->required();
    sub->add_option("--out", options.out_path, "Report path (default: stdout)");
    sub->add_option("--format", options.format, "Report format")
        ->transform(CLI::CheckedTransformer(formats, CLI::ignore_case));
  }
  check->add_option("--suite", suite, "resolvent, graph, projection, moving-target, mp-identities or all")
      ->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  if (*gallery) return gpinv::cmd_gallery_list(filter, std::cout);
  if (*run) return gpinv::cmd_run(config_path, options, std::cout, std::cerr);
  return gpinv::cmd_check(config_path, suite, options, std::cout, std::cerr);
}

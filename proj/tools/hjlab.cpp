// Command-line front end: hjlab {sweep|verify|baseline} --config PATH [--out DIR] [--format csv,json] [--quiet]
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "hjlab/hjlab.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Vanishing-viscosity rate laboratory for Neumann Hamilton-Jacobi problems"};
  app.set_version_flag("--version", std::string(hjlab::kToolVersion));
  app.require_subcommand(1);

  struct Args {
    std::string config;
    std::string out;
    std::string format;
    bool quiet = false;
  };
  Args args;
  auto add = [&](const std::string& name, const std::string& help) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("--config", args.config, "experiment config file")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", args.out, "output directory (overrides [output] dir)");
    sub->add_option("--format", args.format, "comma-separated output formats: csv, json");
    sub->add_flag("--quiet", args.quiet, "suppress the summary table");
    return sub;
  };
  CLI::App* sweep = add("sweep", "run the epsilon sweep named in the config");
  CLI::App* verify = add("verify", "run the invariant and certificate suite on one problem");
  CLI::App* baseline = add("baseline", "heat-equation baseline for the config's terminal datum");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  hjlab::RunOptions opt;
  opt.quiet = args.quiet;
  if (!args.out.empty()) opt.out_dir = args.out;
  if (!args.format.empty()) {
    std::vector<std::string> formats;
    std::string item;
    std::istringstream in(args.format);
    while (std::getline(in, item, ',')) formats.push_back(hjlab::detail::trim(item));
    opt.formats = formats;
  }
  hjlab::Command cmd = hjlab::Command::sweep;
  if (verify->parsed()) cmd = hjlab::Command::verify;
  if (baseline->parsed()) cmd = hjlab::Command::baseline;
  (void)sweep;
  return hjlab::run_file(args.config, cmd, opt, std::cout, std::cerr);
}

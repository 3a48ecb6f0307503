#include <exception>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "ep/commands.hpp"
#include "ep/config.hpp"
#include "ep/errors.hpp"

namespace {

struct SubArgs {
  std::string config_path;
  std::string outdir;
};

void add_subcommand(CLI::App& app, const std::string& name, const std::string& desc,
                    SubArgs& args, std::string& chosen) {
  CLI::App* sub = app.add_subcommand(name, desc);
  sub->add_option("--config", args.config_path, "path to a run configuration file")
      ->required()
      ->check(CLI::ExistingFile);
  sub->add_option("--out", args.outdir, "output directory (overrides the config)");
  sub->callback([&chosen, name]() { chosen = name; });
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"steady axisymmetric Euler-Poisson flows in a concentric cylinder"};
  app.require_subcommand(1);

  SubArgs args;
  std::string chosen;
  add_subcommand(app, "background", "integrate the radial background flow", args, chosen);
  add_subcommand(app, "sonic", "locate the sonic radius of a transonic background", args, chosen);
  add_subcommand(app, "solve", "run the perturbed fixed-point solver", args, chosen);
  add_subcommand(app, "check3d", "evaluate both residual families on 3D presets", args, chosen);
  add_subcommand(app, "residual", "solve on two grids and tabulate equation residuals", args, chosen);
  add_subcommand(app, "sweep", "run the solver over the configured eps values", args, chosen);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    const ep::RunConfig cfg = ep::load_config(args.config_path);
    const std::string outdir = args.outdir.empty() ? cfg.outdir : args.outdir;
    return ep::run_command(chosen, cfg, outdir);
  } catch (const ep::solver_error& e) {
    std::cerr << "error [" << ep::errc_name(e.code()) << "]: " << e.what() << "\n";
    return e.code() == ep::errc::config_error ? 2 : 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}

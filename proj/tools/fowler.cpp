#include "fowler/commands.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <string>

int main(int argc, char** argv) {
  CLI::App app{"Pseudo-spectral simulator and property checks for the Fowler equation"};
  app.require_subcommand(1);

  struct Options {
    std::string config;
    std::string out = ".";
    bool snapshots = false;
  };
  Options opt;
  const char* commands[][2] = {
      {"operator-check", "Compare the Fourier and integral evaluations of the nonlocal operator"},
      {"kernel-report", "Kernel shapes, gradient norms and semigroup residuals"},
      {"evolve", "Evolve the perturbation equation around the configured profile"},
      {"evolve-full", "Evolve the full equation from profile + perturbation"},
      {"convergence", "Self-convergence study of the time integrator"},
  };
  for (auto& c : commands) {
    CLI::App* sub = app.add_subcommand(c[0], c[1]);
    sub->add_option("config", opt.config, "Config file")->required();
    sub->add_option("--out", opt.out, "Output directory")->capture_default_str();
    sub->add_flag("--snapshots", opt.snapshots, "Write field snapshots (evolve commands)");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return fowler::exit_usage;
  }
  const std::string name = app.get_subcommands().front()->get_name();
  return fowler::run_command(name, opt.config, opt.out, opt.snapshots, std::cerr);
}

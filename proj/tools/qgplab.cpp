#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "qgp/cli.hpp"
#include "qgp/error.hpp"

namespace {

using namespace qgp::cli;

struct Flags {
  std::string config;
  std::optional<std::string> out;
  std::optional<std::size_t> grid;
  std::optional<double> tol;
  std::optional<double> delta;
  std::optional<unsigned long long> seed;
};

void add_flags(CLI::App* cmd, Flags& f, bool needs_config) {
  auto* c = cmd->add_option("--config", f.config, "scenario file");
  if (needs_config) c->required()->check(CLI::ExistingFile);
  cmd->add_option("--out", f.out, "output directory");
  cmd->add_option("--grid", f.grid, "number of grid samples");
  cmd->add_option("--tol", f.tol, "stepper tolerance");
  cmd->add_option("--delta", f.delta, "new-condition delta");
  cmd->add_option("--seed", f.seed, "random seed (recorded only; runs are deterministic)");
}

Overrides overrides(const Flags& f) {
  Overrides o;
  if (f.out) o.out = *f.out;
  o.grid = f.grid;
  o.tol = f.tol;
  o.delta = f.delta;
  o.seed = f.seed;
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Adiabatic evolution and quantum geometric potential lab"};
  app.require_subcommand(1);
  Flags sim, cond, fig, sweep;
  auto* c_sim = app.add_subcommand("simulate", "evolve a scenario, write trajectory.csv and fidelity.csv");
  auto* c_cond = app.add_subcommand("conditions", "evaluate adiabatic conditions, write conditions.csv");
  auto* c_fig = app.add_subcommand("figure1", "robust-model Bloch orbits, write bloch.csv, P.csv, figure1.svg");
  auto* c_sweep = app.add_subcommand("sweep", "grid sweep over [sweep] parameters, write sweep.csv");
  add_flags(c_sim, sim, true);
  add_flags(c_cond, cond, true);
  add_flags(c_fig, fig, false);
  add_flags(c_sweep, sweep, true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  for (const Flags* f : {&sim, &cond, &fig, &sweep})
    if (f->seed) std::cout << "seed: " << *f->seed << " (unused, runs are deterministic)\n";

  try {
    if (c_fig->parsed()) {
      return cmd_figure1(fig.out.value_or("out"), fig.grid.value_or(8192), fig.tol.value_or(1e-10), std::cout);
    }
    const Flags& f = c_sim->parsed() ? sim : c_cond->parsed() ? cond : sweep;
    const Scenario s = load_scenario(load_config(f.config), overrides(f));
    if (c_sim->parsed()) return cmd_simulate(s, std::cout);
    if (c_cond->parsed()) return cmd_conditions(s, std::cout);
    return cmd_sweep(s, std::cout);
  } catch (const qgp::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return e.kind() == qgp::ErrorKind::ConfigError ? kExitConfig : kExitNumerical;
  }
}

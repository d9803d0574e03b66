#include <CLI11.hpp>

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include "nlch/errors.hpp"
#include "nlch/experiments.hpp"

namespace {

struct Overrides {
  std::string config;
  std::string config_b;
  std::string out;
  std::optional<std::uint64_t> seed;
  bool strict = false;
  bool lab = false;
};

nlch::RunConfig load(const std::string& path, const Overrides& o) {
  nlch::RunConfig c = path.empty() ? nlch::config_from_table({}) : nlch::load_config(path);
  if (!o.out.empty()) c.out_dir = o.out;
  if (o.seed) {
    for (nlch::InitialSpec* s : {&c.phi0, &c.sigma0}) {
      s->seed = *o.seed;
      s->has_seed = true;
    }
  }
  if (o.strict) c.model.strict_mode = true;
  if (o.lab) c.model.strict_mode = false;
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Non-local viscous Cahn-Hilliard tumour model: checks, runs and sweeps"};
  app.require_subcommand(1);
  Overrides o;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", o.config, "TOML configuration file (defaults apply when omitted)");
    sub->add_option("--out", o.out, "output directory (overrides output.dir)");
    sub->add_option("--seed", o.seed, "seed for random initial data");
    auto* strict = sub->add_flag("--strict", o.strict, "enforce every assumption");
    auto* lab = sub->add_flag("--lab", o.lab, "enforce only structural assumptions");
    strict->excludes(lab);
  };

  auto* check = app.add_subcommand("check", "validate assumptions of a configuration");
  auto* run = app.add_subcommand("run", "integrate and write diagnostics");
  auto* compare = app.add_subcommand("compare", "continuous dependence on initial data");
  auto* sweep_tau = app.add_subcommand("sweep-tau", "vanishing viscosity sweep");
  auto* sweep_lambda = app.add_subcommand("sweep-lambda", "regularization sweep");
  auto* table = app.add_subcommand("potential-table", "tabulate F, F_lambda and F'_lambda");
  for (CLI::App* sub : {check, run, compare, sweep_tau, sweep_lambda, table}) add_common(sub);
  compare->add_option("--config-b", o.config_b, "second configuration (default: perturbed copy of --config)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    const nlch::RunConfig c = load(o.config, o);
    if (check->parsed()) return nlch::cmd_check(c, std::cout);
    if (run->parsed()) return nlch::cmd_run(c, std::cout);
    if (compare->parsed()) {
      std::optional<nlch::RunConfig> b;
      if (!o.config_b.empty()) b = load(o.config_b, o);
      return nlch::cmd_compare(c, b, std::cout);
    }
    if (sweep_tau->parsed()) return nlch::cmd_sweep_tau(c, std::cout);
    if (sweep_lambda->parsed()) return nlch::cmd_sweep_lambda(c, std::cout);
    if (table->parsed()) return nlch::cmd_potential_table(c, std::cout);
  } catch (const nlch::IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return nlch::exit_io;
  } catch (const nlch::SolverError& e) {
    std::cerr << "solver error: " << e.what() << " (residual " << e.residual() << ")\n";
    return nlch::exit_solver;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return nlch::exit_validation;
  }
  return nlch::exit_ok;
}

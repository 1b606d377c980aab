#include <iostream>

#include "CLI11.hpp"

#include "commands.hpp"

int main(int argc, char** argv) {
  using ctmc::cli::RunConfig;
  CLI::App app{"Convergence bounds for inhomogeneous finite Markov chains"};
  app.require_subcommand(1);

  RunConfig cfg;
  auto common = [&](CLI::App* sub) {
    sub->add_option("--out", cfg.output_dir, "Output directory")->capture_default_str();
    sub->add_option("--tol", cfg.tol, "Solver tolerance")->capture_default_str();
    sub->add_option("--delta", cfg.delta, "Discrepancy for t*")->capture_default_str();
    sub->add_option("--eps", cfg.eps, "Template parameter of the differential-inequality method")
        ->capture_default_str();
  };

  auto* bound = app.add_subcommand("bound", "Compute convergence certificates");
  bound->add_option("--model", cfg.model_path, "Model file")->required()->check(CLI::ExistingFile);
  bound->add_option("--method", cfg.method, "lognorm | lyapunov | diffineq | all")
      ->check(CLI::IsMember({"lognorm", "lyapunov", "diffineq", "all"}))
      ->capture_default_str();
  bound->add_option("--horizon", cfg.horizon, "Time horizon t0 t1 (used by --optimize-eps)")->expected(2);
  bound->add_flag("--optimize-eps", cfg.optimize_eps, "Choose eps maximizing the bound over the horizon");
  bound->add_flag("--dump-matrices", cfg.dump_matrices, "Write A, B and B* at t0 as CSV");
  common(bound);

  auto* solve = app.add_subcommand("solve", "Integrate the forward Kolmogorov system");
  solve->add_option("--model", cfg.model_path, "Model file")->required()->check(CLI::ExistingFile);
  solve->add_option("--horizon", cfg.horizon, "Time horizon t0 t1")->expected(2)->capture_default_str();
  solve->add_option("--initial", cfg.initial, "Initial state index or 'uniform'")->capture_default_str();
  solve->add_flag("--plot", cfg.plot, "Write SVG plots");
  solve->add_flag("--stiff", cfg.stiff, "Use the implicit-midpoint fallback");
  common(solve);

  auto* validate = app.add_subcommand("validate", "Check a certificate against transient solutions");
  validate->add_option("--model", cfg.model_path, "Model file")->required()->check(CLI::ExistingFile);
  validate->add_option("--cert", cfg.cert_path, "Certificate file")->required()->check(CLI::ExistingFile);
  validate->add_option("--horizon", cfg.horizon, "Time horizon t0 t1")->expected(2)->capture_default_str();
  validate->add_option("--initial", cfg.initial, "First initial state (the second is the opposite end)")
      ->capture_default_str();
  validate->add_flag("--stiff", cfg.stiff, "Use the implicit-midpoint fallback");
  common(validate);

  auto* examples = app.add_subcommand("examples", "Reproduce a reference example end to end");
  examples->add_option("which", cfg.example, "1 (bulk arrivals) or 2 (bulk service)")
      ->required()
      ->check(CLI::IsMember({1, 2}));
  common(examples);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : ctmc::cli::kRefused;
  }
  cfg.command = app.get_subcommands().front()->get_name();
  return ctmc::cli::run(cfg, std::cout, std::cerr);
}

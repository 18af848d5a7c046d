// hessianlab: numerical laboratory for the k-Hessian symmetric-function
// calculus.  Subcommands: identities, inequality, search, solve-radial,
// solve-grid, rigidity.
#include <CLI11.hpp>

#include "../src/cli/commands.hpp"
#include "hessianlab/io.hpp"

int main(int argc, char** argv) {
  CLI::App app{"hessianlab: k-Hessian concavity-inequality laboratory"};
  app.require_subcommand(1);

  const std::vector<std::string> names = {"identities", "inequality", "search",
                                          "solve-radial", "solve-grid", "rigidity"};
  struct SubArgs {
    std::string config_path;
    std::string out_dir;
    long seed = -1;
    int workers = -1;
    double tolerance_scale = -1.0;
    std::vector<std::string> sets;
  };
  std::map<std::string, SubArgs> args;

  for (const std::string& name : names) {
    CLI::App* sub = app.add_subcommand(name);
    SubArgs& a = args[name];
    sub->add_option("--config", a.config_path, "run configuration file (key = value)");
    sub->add_option("--out", a.out_dir, "output directory");
    sub->add_option("--seed", a.seed, "RNG seed override");
    sub->add_option("--workers", a.workers,
                    "worker threads (HESSIANLAB_WORKERS or hardware default)");
    sub->add_option("--tolerance-scale", a.tolerance_scale,
                    "multiplier on every tolerance");
    sub->add_option("--set", a.sets, "extra key=value overrides")->take_all();
  }

  CLI11_PARSE(app, argc, argv);

  std::string command = app.get_subcommands().front()->get_name();
  const SubArgs& a = args[command];

  hessianlab::cli::RunOptions run;
  try {
    if (!a.config_path.empty())
      run.config = hessianlab::parse_config(hessianlab::read_text_file(a.config_path));
    for (const std::string& kv : a.sets) {
      size_t eq = kv.find('=');
      if (eq == std::string::npos) {
        std::cerr << "config error: --set expects key=value, got " << kv << "\n";
        return 2;
      }
      run.config[kv.substr(0, eq)] = kv.substr(eq + 1);
    }
    if (a.seed >= 0) run.config["seed"] = std::to_string(a.seed);
    if (a.workers >= 0) run.config["workers"] = std::to_string(a.workers);
    if (a.tolerance_scale > 0.0)
      run.config["tolerance_scale"] = std::to_string(a.tolerance_scale);
  } catch (const hessianlab::Error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  }
  run.out_dir = a.out_dir.empty() ? ("hessianlab_out_" + command) : a.out_dir;
  return hessianlab::cli::dispatch(command, std::move(run));
}

// higgslab command line: stability, model-metric, solve, transport, dominate, verify-all.
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "higgslab/pipeline.hpp"
#include "higgslab/scenario.hpp"

int main(int argc, char** argv) {
  using namespace higgslab;
  CLI::App app{"higgslab: cyclic SO0(2,3) Higgs bundle laboratory"};
  app.require_subcommand(1, 1);

  std::string scenario_path, out_dir;
  int refine = 1;
  long long seed = -1;
  std::vector<std::string> overrides;
  const std::vector<std::string> names = {"stability", "model-metric", "solve",
                                          "transport", "dominate",     "verify-all"};
  for (const auto& name : names) {
    auto* sub = app.add_subcommand(name);
    sub->add_option("--scenario", scenario_path, "scenario JSON file")->required();
    sub->add_option("--out", out_dir, "output directory");
    sub->add_option("--refine", refine, "mesh refinement factor")->check(CLI::PositiveNumber);
    sub->add_option("--seed", seed, "random seed (overrides the scenario)")->check(CLI::NonNegativeNumber);
    sub->add_option("--tol-override", overrides, "dotted scenario key=value")->take_all();
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  const std::string sub = app.get_subcommands().front()->get_name();
  try {
    std::map<std::string, std::string> ov;
    for (const auto& o : overrides) {
      const auto eq = o.find('=');
      if (eq == std::string::npos || eq == 0)
        throw scenario::SchemaError("--tol-override expects key=value, got '" + o + "'");
      ov[o.substr(0, eq)] = o.substr(eq + 1);
    }
    const auto sc = scenario::load(scenario_path, ov);
    pipeline::RunOptions opt;
    opt.out_dir = out_dir;
    opt.refine = refine;
    if (seed >= 0) opt.seed = static_cast<std::uint64_t>(seed);
    return pipeline::run(sub, sc, opt, std::cout);
  } catch (const std::exception& e) {
    const int rc = pipeline::exit_code_for(e);
    const char* kind = rc == 2 ? "schema error" : rc == 3 ? "precondition failure"
                     : rc == 4 ? "convergence failure" : "error";
    std::cerr << "higgslab " << sub << ": " << kind << ": " << e.what() << '\n';
    return rc;
  }
}

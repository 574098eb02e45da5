#pragma once
// Subcommand drivers shared by the CLI and the acceptance binary.
#include <cstdint>
#include <memory>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "higgslab/hitchin.hpp"
#include "higgslab/scenario.hpp"

namespace higgslab::pipeline {

struct RunOptions {
  std::string out_dir;                 // empty: no files written
  int refine = 1;                      // multiplies every mesh size
  std::optional<std::uint64_t> seed;   // overrides the scenario seed
};

struct Check {
  std::string group;  // stability, model, solver, gap, transport, morse
  std::string name;
  bool pass = false;
  double value = 0.0;
  double threshold = 0.0;
  std::string detail;
};

struct SolvedScenario {
  hitchin::MetricSolution solution;
  hitchin::DerivedFields derived;
  std::shared_ptr<const MetricField> field;
};
SolvedScenario solve_scenario(const scenario::Scenario& sc, int n);

nlohmann::json stability_report(const scenario::Scenario& sc, std::vector<Check>* checks = nullptr);
nlohmann::json model_metric_report(const scenario::Scenario& sc, std::vector<Check>* checks = nullptr);
nlohmann::json solve_report(const scenario::Scenario& sc, const SolvedScenario& s);
nlohmann::json transport_report(const scenario::Scenario& sc, const SolvedScenario& s,
                                std::uint64_t seed, std::vector<Check>* checks = nullptr);
nlohmann::json dominate_report(const scenario::Scenario& sc, const SolvedScenario& s,
                               std::vector<Check>* checks = nullptr,
                               const std::string& out_dir = "");

// Full invariant suite; fills `report` with every measured quantity.
std::vector<Check> verify_all(const scenario::Scenario& sc, const RunOptions& opt,
                              nlohmann::json& report);

// Runs one subcommand, writes artifacts under opt.out_dir and returns the exit status
// (0 when every asserted invariant holds, 1 otherwise). Errors propagate as exceptions.
int run(const std::string& subcommand, const scenario::Scenario& sc, const RunOptions& opt,
        std::ostream& out);

// Maps exceptions to exit statuses: 2 schema, 3 precondition, 4 convergence.
int exit_code_for(const std::exception& e);

}  // namespace higgslab::pipeline

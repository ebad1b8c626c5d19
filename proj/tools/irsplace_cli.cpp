// irsplace: run placement experiments, self-checks, and LP dumps.
//
//   irsplace run <config.json> --out <dir>
//   irsplace verify <bounds|guarantees|oracle|crossover> [--trials K] [--seed S]
//   irsplace lp-dump <instance.json>
//
// Exit status: 0 ok, 1 verification failure, 2 bad input.

#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"

#include "irsplace/experiment.hpp"
#include "irsplace/io.hpp"
#include "irsplace/lp.hpp"
#include "irsplace/verify.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kVerifyFailed = 1;
constexpr int kBadInput = 2;

int cmd_run(const std::string& config_path, const std::string& out_dir) {
  const irsplace::ExperimentConfig cfg = irsplace::experiment_from_json(irsplace::read_json_file(config_path));
  const irsplace::ExperimentOutput out = irsplace::run_experiment(cfg);
  irsplace::write_outputs(out_dir, out);
  std::cerr << "wrote " << out.rows.size() << " rows to " << out_dir << "\n";
  return kOk;
}

int cmd_verify(const std::string& suite, std::optional<std::uint64_t> trials, std::uint64_t seed) {
  irsplace::SuiteReport rep;
  if (suite == "bounds") {
    rep = irsplace::verify_bounds(trials.value_or(100000), seed);
  } else if (suite == "guarantees") {
    rep = irsplace::verify_guarantees(trials.value_or(100000), seed);
  } else if (suite == "oracle") {
    rep = irsplace::verify_oracle(trials.value_or(200), seed);
  } else if (suite == "crossover") {
    rep = irsplace::verify_crossover();
  } else {
    std::cerr << "unknown suite '" << suite << "' (bounds, guarantees, oracle, crossover)\n";
    return kBadInput;
  }
  std::cout << rep.to_json().dump(2) << "\n";
  return rep.passed() ? kOk : kVerifyFailed;
}

int cmd_lp_dump(const std::string& path) {
  const irsplace::ProblemInstance inst = irsplace::instance_from_json(irsplace::read_json_file(path));
  irsplace::dump_text(irsplace::build_lpr(inst), std::cout);
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"IRS placement: LP relaxation, rounding heuristics and Monte Carlo checks"};
  app.require_subcommand(1);

  std::string config_path, out_dir;
  auto* run = app.add_subcommand("run", "run a parameter sweep and write CSV/JSONL results");
  run->add_option("config", config_path, "experiment config (JSON)")->required();
  run->add_option("--out", out_dir, "output directory")->required();

  std::string suite;
  std::optional<std::uint64_t> trials;
  std::uint64_t seed = 1;
  auto* verify = app.add_subcommand("verify", "run a self-check suite and print a JSON report");
  verify->add_option("suite", suite, "bounds | guarantees | oracle | crossover")->required();
  verify->add_option("--trials", trials, "Monte Carlo trials (oracle: instance count)");
  verify->add_option("--seed", seed, "master seed");

  std::string instance_path;
  auto* dump = app.add_subcommand("lp-dump", "print the relaxation of an instance");
  dump->add_option("instance", instance_path, "instance (JSON)")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kBadInput;
  }

  try {
    if (*run) return cmd_run(config_path, out_dir);
    if (*verify) return cmd_verify(suite, trials, seed);
    if (*dump) return cmd_lp_dump(instance_path);
  } catch (const irsplace::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kBadInput;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return kBadInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kBadInput;
  }
  return kOk;
}

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "zfwedge/json_io.hpp"
#include "zfwedge/scattering.hpp"
#include "zfwedge/wavefn.hpp"

namespace zfw {

enum ExitCode : int { kExitPass = 0, kExitCheckFailed = 1, kExitConfig = 2, kExitIndeterminate = 3 };

struct RunConfig {
  std::string family = "zn";
  std::optional<int> N;  // commands pick their own default when unset
  double m1 = 1.0;
  std::optional<double> B;
  std::vector<BlaschkeSpec> blaschke;

  double tol_alg = 1e-10;
  double tol_quad = 1e-7;
  double tol_residue = 1e-8;
  double tol_comm = 1e-6;
  double tol_err = 1e-7;
  double counterexample_floor = 1e-3;

  std::uint64_t seed = 42;
  QuadSpec quad{160, 8.0, 640, 192};
  int nmax = 2;
  bool zero_factor = true;
  int bootstrap_points = 50;

  std::string out_dir = "zfwedge-out";
  std::string format = "json";
};

// "kind:k:re:im"
BlaschkeSpec parse_blaschke(const std::string& text);
ScatteringData build_model(const RunConfig& c, int default_N = 3);
json config_to_json(const RunConfig& c, const ScatteringData& s);

struct CommandResult {
  int exit_code = kExitPass;
  json report;  // schema, command, config, status, results; timestamps under "metadata"
  std::vector<std::string> files;
  std::vector<std::string> summary;
};

const std::vector<std::string>& command_names();
// Runs one command and writes its files under c.out_dir. Config problems throw ConfigError.
CommandResult run_command(const std::string& name, const RunConfig& c);

// Report without the metadata key, dumped compactly.
std::string stable_dump(const json& report);

}  // namespace zfw

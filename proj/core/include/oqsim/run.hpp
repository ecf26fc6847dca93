#pragma once

// Subcommand orchestration behind the command-line tool: loads and compiles a
// model file, runs the requested solvers, emits CSV files, and maps every
// failure class to a process exit code.

#include <cstdint>
#include <string>

namespace oqsim {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 2;  // bad input, failed invariant suite
inline constexpr int kExitDisagreement = 3;  // solvers disagree beyond tolerance
inline constexpr int kExitIo = 4;

struct RunConfig {
  std::string command;  // validate | simulate | compare | traj | photocount | dfs
  std::string model_path;
  double t_max = 10.0;
  int points = 101;            // >= 2, grid 0..t_max inclusive
  std::string solver = "all";  // oracle | nud | mc | all
  int trajectories = 2000;
  std::uint64_t seed = 7041;
  std::string out_dir = ".";
  bool drop_lamb_shift = false;  // sector solvers use the bare Hamiltonian
  double tol = 1e-8;             // sector-vs-oracle disagreement bound
};

// Executes the configured subcommand, reporting to stdout/stderr.
// Never throws; returns one of the kExit* codes.
int run(const RunConfig& config);

}  // namespace oqsim

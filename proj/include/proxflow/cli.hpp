#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "proxflow/io.hpp"

namespace proxflow::cli {

enum ExitCode : int { kOk = 0, kInvalidInput = 1, kNumericalAbort = 2 };

struct ExperimentConfig {
  ProblemSpec problem;
  double gamma = 0.0;
  double lambda = 0.0;
  std::optional<Vec> u0;  // drawn uniformly from [-1, 1]^n with `seed` when absent
  std::optional<Vec> v0;  // zero when absent
  double t_end = 0.0;
  double h = 0.0;
  int sample_every = 0;  // 0 = automatic
  std::set<std::string> outputs{"trajectory", "energy", "rates", "summary"};
  std::uint64_t seed = 0;
};

ExperimentConfig config_from_json(const io::json& j);

// Initial position actually used by a run.
Vec initial_position(const ExperimentConfig& config, int dim);

struct RunResult {
  Trajectory trajectory;
  EnergyTrace energy;
  std::optional<RateReport> rate_report;
  std::string rate_note;  // why rate_report is absent
  bool energy_monotone = false;
  std::string warning;
  io::json summary;
};

// Integrates, monitors and classifies one configuration. Throws
// InvalidArgument on bad input and NumericalError on integration abort.
RunResult run_experiment(const ExperimentConfig& config);

// Writes the requested artifacts of a finished run into out_dir.
void write_run_outputs(const ExperimentConfig& config, const RunResult& result, const std::string& out_dir);

// Full command line entry point; args excludes the program name.
int main_entry(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace proxflow::cli

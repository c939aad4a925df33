// Subcommand implementations: sweep orchestration, CSV and manifest output.
#pragma once

#include <optional>
#include <string>

#include "paramsim/config.hpp"

namespace paramsim {

struct CliOptions {
  std::string out_dir;                // overrides config output.dir when set
  int workers = 1;
  bool calibrate = false;             // --calibrate
  std::optional<bool> model_full;     // --model full|effective
  bool full_lindblad = false;         // --full-lindblad
};

inline constexpr int exit_ok = 0;
inline constexpr int exit_validation_error = 1;
inline constexpr int exit_numerical_error = 2;

// Runs one of {couplings, gate, anneal, anneal-sweep, topt-scan,
// coherence-sweep}; writes CSV data plus a JSON manifest into the output
// directory and returns the process exit code.
int run_subcommand(const std::string& name, const std::string& config_path,
                   const CliOptions& options);

}  // namespace paramsim

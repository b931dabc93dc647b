#pragma once

// Experiment configuration shared by every harness command.
//
// Config file grammar (a TOML subset read by CLI11), one `key = value` per
// line, `#` starts a comment:
//   experiment   = "gen" | "prune" | "riemann" | "inject" | "fit" | "verify"
//   kind         = "optimal" | "pure" | "subopt"
//   n            = 20
//   chi_max      = 8
//   lambda       = [0.05, 0.1]
//   n_sweeps     = 20
//   objective    = ["s_sr", "s_vn"]
//   cutoff_mode  = "relative_value" | "truncated_weight"
//   gradient     = "analytic" | "finite_difference"
//   ... every remaining field of ExperimentConfig under its own name.
// Command-line flags override file values.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "lpdo/error.hpp"
#include "lpdo/stiefel.hpp"
#include "lpdo/tensor.hpp"

namespace lpdo::harness {

class UsageError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

enum class Experiment { gen, prune, riemann, inject, fit, verify };
enum class StateKind { optimal, pure, subopt };

std::string to_string(Experiment e);
std::string to_string(StateKind k);
std::string to_string(CutoffMode m);
Experiment parse_experiment(const std::string& text);
StateKind parse_state_kind(const std::string& text);
CutoffMode parse_cutoff_mode(const std::string& text);

struct ExperimentConfig {
  Experiment experiment = Experiment::prune;
  StateKind kind = StateKind::subopt;
  std::int64_t n = 20;
  std::int64_t chi_max = 8;
  std::vector<double> lambda{0.5};
  int n_sweeps = 20;
  std::vector<ObjectiveKind> objective{ObjectiveKind::s_sr};
  OptimizerConfig optimizer;
  double gamma_d = 0.5;
  double gamma_b = 0.5;
  std::uint64_t seed = 1;
  CutoffMode cutoff_mode = CutoffMode::relative_value;
  bool bidirectional = false;
  // riemann: optional pre-stall of the input with plain truncation
  double stall_lambda = 1e-8;
  int stall_sweeps = 0;
  // inject
  std::string unitary = "cnot";
  std::int64_t site = 0;
  // paths; an empty output means stdout for CSV commands
  std::string input;
  std::string input_b;
  std::string output;
  // fit
  std::string csv;
  std::string x_col = "sweep";
  std::string y_col = "chi_mean";
  std::string where;
  /// Worker cap; 0 defers to LPDO_THREADS, then the hardware.
  int threads = 0;

  /// Throws UsageError naming the first bad field.
  void validate() const;
  bool operator==(const ExperimentConfig& other) const;
};

/// Lossless text form in the grammar above (doubles with 17 digits).
std::string to_config_text(const ExperimentConfig& config);

struct ParsedCommandLine {
  ExperimentConfig config;
  /// Set when parsing already produced the process result (e.g. --help).
  std::optional<int> exit_code;
};

/// Parses `lpdo <command> [flags]`, reading `--config FILE` first.
/// Throws UsageError on bad flags or values.
ParsedCommandLine parse_command_line(int argc, const char* const* argv, std::ostream& out,
                                     std::ostream& err);

/// Reads a config file alone (no flags).
ExperimentConfig load_config(const std::string& path);

}  // namespace lpdo::harness

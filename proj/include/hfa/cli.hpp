#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "hfa/experiments.hpp"
#include "hfa/result_table.hpp"

namespace hfa {

inline const std::vector<std::string>& experiment_names() {
  static const std::vector<std::string> names{"converge",     "locality",    "wegner",
                                              "localisation", "gap-closing", "sweep-periodic",
                                              "multiscale-probe", "verify"};
  return names;
}

/// Everything one invocation needs. Keys of the config file and the long
/// flags share the names listed by config_keys().
struct RunConfig {
  std::string experiment = "converge";
  ExperimentSpec spec;
  /// Empty: write to standard output.
  std::string output;
  std::string format = "csv";
  /// Negative: the middle site |domain| / 2.
  Index site = -1;
  double amplitude = 1.0;
  double lambda0 = 2.0;
  std::vector<double> epsilons{0.0, 0.001, 0.002, 0.005, 0.01, 0.02, 0.05, 0.1};
  std::vector<double> xi_values{0.0, 1.0, 2.0, 3.0, 4.0};
  MultiscaleKnobs multiscale;

  bool operator==(const RunConfig&) const = default;
};

struct ConfigKey {
  std::string name;
  std::string help;
};

const std::vector<ConfigKey>& config_keys();

/// Sets one key from its text value; throws ConfigError naming the key.
void apply_setting(RunConfig& config, std::string_view key, std::string_view value);

/// Flat `key = value` lines; blank lines and `#` comments are ignored.
RunConfig parse_config_text(std::string_view text, RunConfig base = {});
/// Every key in config_keys() order, reals with 17 significant digits.
std::string emit_config(const RunConfig& config);

/// Throws ConfigError on values that are well-formed but unusable.
void validate(const RunConfig& config);

/// Merges an optional `--config` file with flag overrides (flags win).
RunConfig parse_command_line(const std::vector<std::string>& args);

struct RunOutcome {
  /// 0 success, 1 solver failure (the table still carries partial results).
  int exit_code = 0;
  ResultTable table;
};

/// Dispatches to the experiment and stamps the config echo, version and run id.
RunOutcome run(const RunConfig& config);

/// Serialises in the configured format, with the timestamp as the only
/// run-dependent line.
std::string render(const RunConfig& config, const ResultTable& table, const std::string& timestamp);

/// Full command-line behaviour: 0 success, 1 solver failure, 2 config error.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace hfa

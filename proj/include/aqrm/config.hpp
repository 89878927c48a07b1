#pragma once

#include <optional>
#include <string>
#include <vector>

#include "aqrm/error.hpp"
#include "aqrm/fock.hpp"
#include "json.hpp"

namespace aqrm {

/// Malformed or inconsistent run configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

enum class OutputFormat { csv, jsonl };

const std::vector<std::string>& known_commands();

/// A run: the subcommand, its fully resolved configuration tree and the
/// typed settings every command shares.
struct RunConfig {
  std::string command;
  nlohmann::ordered_json tree;
  std::string out_path;  ///< empty: standard output, no sidecar
  OutputFormat format = OutputFormat::csv;
  int workers = 1;
  Truncation truncation;
};

/// Defaults for `command`, merged with the optional JSON file, then the
/// dotted `key=value` overrides (value parsed as JSON, else taken as a string).
RunConfig load_config(const std::string& command, const std::optional<std::string>& config_path,
                      const std::vector<std::string>& overrides);

nlohmann::ordered_json default_tree(const std::string& command);

/// Sets tree[a][b][c] for "a.b.c=value".
void apply_override(nlohmann::ordered_json& tree, const std::string& assignment);

/// A grid entry: a number, a list of numbers, or {"linspace": [lo, hi, count]}.
std::vector<double> grid_values(const nlohmann::ordered_json& spec, const std::string& name);

/// Reads tree.grid.<name>; ConfigError when absent or empty.
std::vector<double> grid(const RunConfig& cfg, const std::string& name);

double number_at(const RunConfig& cfg, const std::string& dotted);
std::optional<double> optional_number_at(const RunConfig& cfg, const std::string& dotted);

}  // namespace aqrm

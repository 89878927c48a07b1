#include "aqrm/config.hpp"

#include <cmath>
#include <fstream>
#include <numbers>

namespace aqrm {

using json = nlohmann::ordered_json;

const std::vector<std::string>& known_commands() {
  static const std::vector<std::string> names{"qfi", "homodyne", "qubit-probe", "finite-freq", "ramsey",
                                              "validate"};
  return names;
}

namespace {

json linspace(double lo, double hi, int count) { return json{{"linspace", {lo, hi, count}}}; }

void merge(json& base, const json& patch) {
  for (auto it = patch.begin(); it != patch.end(); ++it) {
    if (it.value().is_object() && base.contains(it.key()) && base[it.key()].is_object() &&
        !it.value().contains("linspace"))
      merge(base[it.key()], it.value());
    else
      base[it.key()] = it.value();
  }
}

const json* find(const json& tree, const std::string& dotted) {
  const json* node = &tree;
  std::size_t start = 0;
  while (true) {
    const std::size_t dot = dotted.find('.', start);
    const std::string key = dotted.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
    if (!node->is_object() || !node->contains(key)) return nullptr;
    node = &(*node)[key];
    if (dot == std::string::npos) return node;
    start = dot + 1;
  }
}

int int_at(const json& tree, const std::string& dotted) {
  const json* v = find(tree, dotted);
  if (!v || !v->is_number_integer()) throw ConfigError(dotted + " must be an integer");
  return v->get<int>();
}

}  // namespace

json default_tree(const std::string& command) {
  json t;
  t["command"] = command;
  t["model"] = {{"omega", 1.0}, {"eta", 1e6}};
  t["truncation"] = {{"n_start", 32}, {"n_max", 512}, {"rel_tol", 1e-9}};
  t["output"] = {{"path", ""}, {"format", "csv"}};
  t["workers"] = 1;
  if (command == "qfi") {
    t["grid"] = {{"g", {0.5, 0.8, 0.9, 0.95, 0.99}}, {"gamma", {0.0, 1.0 / 3.0}}, {"tau_k", {1}}};
  } else if (command == "homodyne") {
    t["grid"] = {{"g", linspace(0.9, 0.99, 10)}, {"ratio", {1.0, 2.0, 4.0}}};
  } else if (command == "qubit-probe") {
    t["grid"] = {{"ratio", {1.0, 2.0, 4.0}}};
    t["qubit_probe"] = {{"g_min", 0.3},
                        {"g_max", 0.99},
                        {"max_points", 1000},
                        {"states", {"vacuum"}},
                        {"sigma_x_threshold", 0.05}};
  } else if (command == "finite-freq") {
    t["grid"] = {{"g", {0.8, 0.9, 0.95}}, {"eta", {50.0}}, {"gamma", linspace(-0.5, 0.5, 81)}};
    t["finite_freq"] = {{"t_window", {0.9, 1.0}}, {"t_samples", 21}};
  } else if (command == "ramsey") {
    t["grid"] = {{"theta", linspace(0.0, std::numbers::pi, 9)}};
  } else if (command == "validate") {
    t["validate"] = {{"quick", false}};
  } else {
    throw ConfigError("unknown command '" + command + "'");
  }
  return t;
}

void apply_override(json& tree, const std::string& assignment) {
  const std::size_t eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) throw ConfigError("override '" + assignment + "' is not key=value");
  const std::string key = assignment.substr(0, eq);
  const std::string raw = assignment.substr(eq + 1);
  json value = json::parse(raw, nullptr, false);
  if (value.is_discarded()) value = raw;

  json* node = &tree;
  std::size_t start = 0;
  while (true) {
    const std::size_t dot = key.find('.', start);
    const std::string part = key.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
    if (part.empty()) throw ConfigError("override '" + assignment + "' has an empty key segment");
    if (dot == std::string::npos) {
      (*node)[part] = value;
      return;
    }
    if (!node->contains(part) || !(*node)[part].is_object()) (*node)[part] = json::object();
    node = &(*node)[part];
    start = dot + 1;
  }
}

std::vector<double> grid_values(const json& spec, const std::string& name) {
  std::vector<double> out;
  if (spec.is_number()) {
    out.push_back(spec.get<double>());
  } else if (spec.is_array()) {
    for (const auto& v : spec) {
      if (!v.is_number()) throw ConfigError("grid." + name + " must contain numbers only");
      out.push_back(v.get<double>());
    }
  } else if (spec.is_object() && spec.contains("linspace")) {
    const json& l = spec["linspace"];
    if (!l.is_array() || l.size() != 3 || !l[0].is_number() || !l[1].is_number() || !l[2].is_number_integer())
      throw ConfigError("grid." + name + ".linspace must be [lo, hi, count]");
    const double lo = l[0].get<double>();
    const double hi = l[1].get<double>();
    const int count = l[2].get<int>();
    if (count < 1) throw ConfigError("grid." + name + ".linspace count must be >= 1");
    for (int i = 0; i < count; ++i) out.push_back(count == 1 ? lo : lo + (hi - lo) * i / (count - 1));
  } else {
    throw ConfigError("grid." + name + " must be a number, a list or {\"linspace\": [lo, hi, count]}");
  }
  if (out.empty()) throw ConfigError("grid." + name + " is empty");
  for (double v : out)
    if (!std::isfinite(v)) throw ConfigError("grid." + name + " contains a non-finite value");
  return out;
}

std::vector<double> grid(const RunConfig& cfg, const std::string& name) {
  const json* spec = find(cfg.tree, "grid." + name);
  if (!spec) throw ConfigError("grid." + name + " is required for '" + cfg.command + "'");
  return grid_values(*spec, name);
}

double number_at(const RunConfig& cfg, const std::string& dotted) {
  const json* v = find(cfg.tree, dotted);
  if (!v || !v->is_number()) throw ConfigError(dotted + " must be a number");
  return v->get<double>();
}

std::optional<double> optional_number_at(const RunConfig& cfg, const std::string& dotted) {
  const json* v = find(cfg.tree, dotted);
  if (!v) return std::nullopt;
  if (!v->is_number()) throw ConfigError(dotted + " must be a number");
  return v->get<double>();
}

RunConfig load_config(const std::string& command, const std::optional<std::string>& config_path,
                      const std::vector<std::string>& overrides) {
  RunConfig cfg;
  cfg.command = command;
  json user = json::object();
  if (config_path) {
    std::ifstream in(*config_path);
    if (!in) throw ConfigError("cannot read config file " + *config_path);
    const json file = json::parse(in, nullptr, false);
    if (file.is_discarded() || !file.is_object()) throw ConfigError(*config_path + " is not a JSON object");
    if (file.contains("command") && file["command"] != command)
      throw ConfigError(*config_path + " is for command " + file["command"].dump() + ", not " + command);
    user = file;
  }
  for (const auto& o : overrides) apply_override(user, o);

  cfg.tree = default_tree(command);
  const json* model = find(user, "model");
  const bool lab = model && model->is_object() &&
                   (model->contains("lambda1") || model->contains("lambda2") || model->contains("Omega"));
  if (lab) {
    for (const char* k : {"g", "gamma", "ratio", "eta"}) {
      // finite-freq optimizes over its gamma grid; the couplings only fix g and eta.
      if (command == "finite-freq" && std::string(k) == "gamma") continue;
      if (find(user, std::string("grid.") + k))
        throw ConfigError(std::string("model gives laboratory couplings, so grid.") + k +
                          " must not be set as well");
      if (cfg.tree.contains("grid")) cfg.tree["grid"].erase(k);
    }
    if (model->contains("eta")) throw ConfigError("model: give either eta or Omega, not both");
    cfg.tree["model"].erase("eta");
  }
  // A user-set axis replaces its alternative spelling in the defaults.
  for (const auto& [a, b] : {std::pair{"gamma", "ratio"}, std::pair{"tau_k", "omega_t"}}) {
    if (!cfg.tree.contains("grid")) break;
    if (find(user, std::string("grid.") + a)) cfg.tree["grid"].erase(b);
    if (find(user, std::string("grid.") + b)) cfg.tree["grid"].erase(a);
  }
  merge(cfg.tree, user);

  cfg.truncation.n_start = int_at(cfg.tree, "truncation.n_start");
  cfg.truncation.n_max = int_at(cfg.tree, "truncation.n_max");
  cfg.truncation.rel_tol = number_at(cfg, "truncation.rel_tol");
  try {
    validate(cfg.truncation);
  } catch (const DomainError& e) {
    throw ConfigError(e.what());
  }
  cfg.workers = int_at(cfg.tree, "workers");
  if (cfg.workers < 1) throw ConfigError("workers must be >= 1");

  const json* path = find(cfg.tree, "output.path");
  cfg.out_path = path && path->is_string() ? path->get<std::string>() : "";
  const json* fmt = find(cfg.tree, "output.format");
  const std::string f = fmt && fmt->is_string() ? fmt->get<std::string>() : "csv";
  if (f == "csv")
    cfg.format = OutputFormat::csv;
  else if (f == "jsonl" || f == "json-lines")
    cfg.format = OutputFormat::jsonl;
  else
    throw ConfigError("output.format must be csv or jsonl, got '" + f + "'");
  return cfg;
}

}  // namespace aqrm

#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "aqrm/config.hpp"
#include "aqrm/runner.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Critical metrology scans for the anisotropic quantum Rabi model"};
  app.set_version_flag("--version", aqrm::kVersion);
  app.require_subcommand(1);

  struct Options {
    std::string config;
    std::string out;
    std::string format;
    int workers = 0;
    std::vector<std::string> set;
    bool quick = false;
  } opt;

  const std::vector<std::pair<std::string, std::string>> commands{
      {"qfi", "QFI for g: closed form, exact generator and finite difference"},
      {"homodyne", "homodyne (X quadrature) inverted variance at tau"},
      {"qubit-probe", "sigma_x inverted variance at the working points"},
      {"finite-freq", "optimal coupling ratio at finite Omega/omega"},
      {"ramsey", "ideal Ramsey interferometer reference"},
      {"validate", "internal consistency checks"},
  };
  for (const auto& [name, help] : commands) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("--config", opt.config, "JSON configuration file")->check(CLI::ExistingFile);
    sub->add_option("--out", opt.out, "output path (default: stdout)");
    sub->add_option("--format", opt.format, "csv or jsonl")->check(CLI::IsMember({"csv", "jsonl"}));
    sub->add_option("--workers", opt.workers, "parallel workers")->check(CLI::PositiveNumber);
    sub->add_option("--set", opt.set, "override, e.g. grid.g=[0.9,0.95]")->take_all();
    if (name == "validate") sub->add_flag("--quick", opt.quick, "fast subset");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : aqrm::kConfigError;
  }

  const std::string command = app.get_subcommands().front()->get_name();
  std::vector<std::string> overrides = opt.set;
  if (!opt.out.empty()) overrides.push_back("output.path=\"" + opt.out + "\"");
  if (!opt.format.empty()) overrides.push_back("output.format=\"" + opt.format + "\"");
  if (opt.workers > 0) overrides.push_back("workers=" + std::to_string(opt.workers));
  if (opt.quick) overrides.push_back("validate.quick=true");

  try {
    const aqrm::RunConfig cfg = aqrm::load_config(
        command, opt.config.empty() ? std::nullopt : std::optional<std::string>(opt.config), overrides);
    return aqrm::run(cfg, std::cout, std::cerr);
  } catch (const aqrm::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return aqrm::kConfigError;
  } catch (const aqrm::DomainError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return aqrm::kConfigError;
  } catch (const aqrm::Error& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return aqrm::kNumericalFailure;
  }
}

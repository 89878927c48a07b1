#pragma once

#include <iosfwd>
#include <vector>

#include "aqrm/config.hpp"
#include "aqrm/scan.hpp"

namespace aqrm {

inline constexpr const char* kVersion = "0.1.0";

enum ExitCode : int { kOk = 0, kConfigError = 1, kNumericalFailure = 2, kUnconverged = 3 };

/// Dispatches to the command's scan. Throws ConfigError/DomainError on bad
/// input and other aqrm::Error types on numerical failure.
std::vector<ScanRow> run_scan(const RunConfig& cfg);

/// Runs, writes rows (and the `<out>.meta.json` sidecar when writing to a
/// file) and maps failures to exit codes; messages go to `err`.
int run(const RunConfig& cfg, std::ostream& out, std::ostream& err);

/// Rows of the qfi command: analytic, exact-generator and finite-difference QFI
/// for g at each (g, gamma, t).
std::vector<ScanRow> scan_qfi(const std::vector<double>& g, const std::vector<double>& gamma,
                              const std::vector<double>& tau_k, const std::vector<double>& omega_t,
                              double omega, const Truncation& tr, int workers);

}  // namespace aqrm

#pragma once

#include <optional>
#include <vector>

#include "aqrm/scan.hpp"

namespace aqrm {

struct RamseyPoint {
  double theta = 0.0;
  double p_up = 0.0;           ///< (1 + cos theta)/2
  double susceptibility = 0.0;  ///< |dP_up/dtheta| = |sin theta|/2
  /// susceptibility^2 / (P_up (1 - P_up)); empty where the binomial variance vanishes.
  std::optional<double> inv_var;
};

RamseyPoint ramsey_point(double theta);

/// |delta_omega_q tau| < pi/2, strictly.
bool linear_range_check(double delta_omega_q, double tau);

/// Columns: theta, p_up, susceptibility, inv_var.
std::vector<ScanRow> ramsey_scan(const std::vector<double>& theta);

}  // namespace aqrm

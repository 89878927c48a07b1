#include "aqrm/ramsey.hpp"

#include <cmath>
#include <numbers>

#include "aqrm/error.hpp"

namespace aqrm {

RamseyPoint ramsey_point(double theta) {
  RamseyPoint r;
  r.theta = theta;
  r.p_up = (1.0 + std::cos(theta)) / 2.0;
  r.susceptibility = std::abs(std::sin(theta)) / 2.0;
  const double var = r.p_up * (1.0 - r.p_up);
  if (var > 1e-15) r.inv_var = r.susceptibility * r.susceptibility / var;
  return r;
}

bool linear_range_check(double delta_omega_q, double tau) {
  if (!(tau > 0.0)) throw DomainError("linear_range_check: tau must be positive");
  return std::abs(delta_omega_q * tau) < std::numbers::pi / 2.0;
}

std::vector<ScanRow> ramsey_scan(const std::vector<double>& theta) {
  std::vector<ScanRow> rows;
  for (double th : theta) {
    const RamseyPoint p = ramsey_point(th);
    ScanRow row;
    row.has_truncation = false;
    row.input("theta", th);
    row.output("p_up", p.p_up);
    row.output("susceptibility", p.susceptibility);
    row.output("inv_var", p.inv_var, "binomial variance vanishes");
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace aqrm

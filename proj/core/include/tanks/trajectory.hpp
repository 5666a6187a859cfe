#pragma once

#include <array>
#include <string_view>

namespace tanks {

/// One row per control sample. Values are those at the sample instant,
/// before the held input is applied.
struct TrajectoryRow {
  double t = 0.0;
  double h1 = 0.0;
  double h3 = 0.0;
  double h1ref = 0.0;
  double Qi = 0.0;
  double Qi_raw = 0.0;
  double u_s = 0.0;
  double v = 0.0;
  double eta1 = 0.0;
  double eta2 = 0.0;
  double y = 0.0;
  double V = 0.0;
  double Vdot_analytic = 0.0;  // along the nominal model with the applied input
  bool saturated = false;
  int guard_count = 0;

  // Not part of the CSV schema.
  double Vdot_numeric = 0.0;  // finite difference over the first substeps
  int epoch = 0;              // index of the active setpoint
};

inline constexpr std::array<std::string_view, 15> kTrajectoryColumns = {
    "t",   "h1",  "h3", "h1ref", "Qi", "Qi_raw",        "u_s",       "v",
    "eta1", "eta2", "y", "V",     "Vdot_analytic", "saturated", "guard_count"};

}  // namespace tanks

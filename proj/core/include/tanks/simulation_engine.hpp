#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "tanks/backstepping_controller.hpp"
#include "tanks/lyapunov_analysis.hpp"
#include "tanks/plant_model.hpp"
#include "tanks/trajectory.hpp"

namespace tanks {

enum class Integrator { rk4, euler };

std::string_view to_string(Integrator method);
std::optional<Integrator> integrator_from_string(std::string_view name);

struct SimConfig {
  double dt = 0.01;     // integration step (s)
  double ts = 1.0;      // control sample period (s)
  double t_end = 600.0; // s
  Integrator integrator = Integrator::rk4;

  /// Requires 0 < dt <= ts, ts an integer multiple of dt, t_end >= 0.
  void validate() const;
  int substeps() const;       // ts / dt
  std::size_t samples() const; // control samples with t < t_end

  friend bool operator==(const SimConfig&, const SimConfig&) = default;
};

enum class FaultKind { scale_c1, scale_c2, inflow_bias, leak_tank1 };

std::string_view to_string(FaultKind kind);
std::optional<FaultKind> fault_kind_from_string(std::string_view name);

/// Plant-truth perturbation active from t_start on. scale_* multiply a
/// coefficient; inflow_bias adds to the delivered pump flow (m^3/s);
/// leak_tank1 removes a constant flow from T1 (m^3/s).
struct FaultSpec {
  double t_start = 0.0;
  FaultKind kind = FaultKind::scale_c2;
  double magnitude = 1.0;

  friend bool operator==(const FaultSpec&, const FaultSpec&) = default;
};

struct SetpointChange {
  double t = 0.0;         // s
  double fraction = 0.0;  // h1ref / h0

  friend bool operator==(const SetpointChange&, const SetpointChange&) = default;
};

struct Scenario {
  PlantParams plant;  // nominal parameters, also used by the controller
  double z0 = 1.0;
  PlantState initial_state;
  std::vector<SetpointChange> setpoints;
  std::vector<FaultSpec> faults;
  Gains gains;
  SimConfig sim;

  /// Throws std::invalid_argument (or InfeasibleSetpoint) on any violated
  /// invariant.
  void validate() const;

  friend bool operator==(const Scenario&, const Scenario&) = default;
};

/// Plant truth at time t: nominal parameters with active faults applied.
struct PlantTruth {
  PlantParams params;
  double inflow_bias = 0.0;  // m^3/s
  double leak = 0.0;         // m^3/s
};

PlantTruth effective_plant(const Scenario& scenario, double t);

/// Flow actually entering T1 for a pump command under the given truth.
double delivered_inflow(double Qi, const PlantTruth& truth);

/// One fixed step with the net T1 inflow held constant, then saturate_state.
/// Throws DomainError on non-finite intermediate values.
PlantState integrate_step(const PlantState& state, double inflow,
                          const PlantParams& p, double dt, Integrator method);

struct EpochMetrics {
  double t_start = 0.0;
  double t_end = 0.0;  // last sample time of the epoch
  double h1ref = 0.0;
  std::optional<double> settling_time;  // s after t_start; empty if unsettled
  double overshoot_pct = 0.0;           // percent of the step size
  double steady_state_error = 0.0;      // max |h1 - h1ref| over last 10 %
  double max_abs_v = 0.0;
  double saturation_duty_pct = 0.0;
};

struct RunSummary {
  std::vector<EpochMetrics> epochs;
  double max_abs_v = 0.0;
  double saturation_duty_pct = 0.0;
  std::size_t lyapunov_violations = 0;
  std::size_t guard_activations = 0;
};

struct RunResult {
  std::vector<TrajectoryRow> rows;
  CertificationReport certification;
  RunSummary summary;
};

/// Band for settling time, relative to h1ref.
inline constexpr double kSettlingBand = 0.02;

/// Metrics over a row sequence; epochs are delimited by TrajectoryRow::epoch.
RunSummary summarize(std::span<const TrajectoryRow> rows,
                     const CertificationReport& certification);

using ControlLaw = std::function<ControlOutput(
    const ErrorState&, const Gains&, const ReferencePoint&,
    const DerivedParams&, double u_s)>;

/// Closed-loop run with the backstepping law.
RunResult run(const Scenario& scenario);

/// Closed-loop run with a substitute law (detector tests, experiments).
RunResult run(const Scenario& scenario, const ControlLaw& law);

struct GainSweepRow {
  Gains gains;
  RunSummary summary;
};

/// Runs the template scenario for every (k_phi, k_y) pair, k_phi major.
/// Cells are independent and run on up to `threads` workers
/// (0 = hardware concurrency); output order does not depend on it.
std::vector<GainSweepRow> gain_sweep(const Scenario& scenario,
                                     std::span<const double> k_phi_values,
                                     std::span<const double> k_y_values,
                                     unsigned threads = 0);

}  // namespace tanks

#include "tanks/simulation_engine.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "tanks/errors.hpp"

namespace tanks {

namespace {

constexpr double kTimeSlack = 1e-9;

bool is_finite(const PlantState& s) {
  return std::isfinite(s.h1) && std::isfinite(s.h3);
}

PlantState axpy(const PlantState& s, double h, const StateDerivative& d) {
  return {s.h1 + h * d.dh1, s.h3 + h * d.dh3};
}

// Index of the setpoint active at sample time t.
std::size_t active_setpoint(const std::vector<SetpointChange>& setpoints,
                            double t, double ts) {
  std::size_t idx = 0;
  for (std::size_t i = 0; i < setpoints.size(); ++i) {
    if (setpoints[i].t <= t + kTimeSlack * ts) idx = i;
  }
  return idx;
}

}  // namespace

std::string_view to_string(Integrator method) {
  switch (method) {
    case Integrator::rk4:
      return "rk4";
    case Integrator::euler:
      return "euler";
  }
  return "rk4";
}

std::optional<Integrator> integrator_from_string(std::string_view name) {
  if (name == "rk4") return Integrator::rk4;
  if (name == "euler") return Integrator::euler;
  return std::nullopt;
}

std::string_view to_string(FaultKind kind) {
  switch (kind) {
    case FaultKind::scale_c1:
      return "scale_c1";
    case FaultKind::scale_c2:
      return "scale_c2";
    case FaultKind::inflow_bias:
      return "inflow_bias";
    case FaultKind::leak_tank1:
      return "leak_tank1";
  }
  return "scale_c2";
}

std::optional<FaultKind> fault_kind_from_string(std::string_view name) {
  if (name == "scale_c1") return FaultKind::scale_c1;
  if (name == "scale_c2") return FaultKind::scale_c2;
  if (name == "inflow_bias") return FaultKind::inflow_bias;
  if (name == "leak_tank1") return FaultKind::leak_tank1;
  return std::nullopt;
}

void SimConfig::validate() const {
  if (!std::isfinite(dt) || !std::isfinite(ts) || !std::isfinite(t_end)) {
    throw std::invalid_argument("SimConfig: non-finite dt, ts or t_end");
  }
  if (dt <= 0.0 || dt > ts * (1.0 + kTimeSlack)) {
    throw std::invalid_argument("SimConfig: need 0 < dt <= ts");
  }
  const double ratio = ts / dt;
  if (std::abs(ratio - std::round(ratio)) > 1e-9 * ratio) {
    std::ostringstream msg;
    msg << "SimConfig: ts = " << ts << " is not an integer multiple of dt = "
        << dt;
    throw std::invalid_argument(msg.str());
  }
  if (t_end < 0.0) throw std::invalid_argument("SimConfig: t_end < 0");
}

int SimConfig::substeps() const {
  return static_cast<int>(std::lround(ts / dt));
}

std::size_t SimConfig::samples() const {
  if (t_end <= 0.0) return 0;
  return static_cast<std::size_t>(std::ceil(t_end / ts - kTimeSlack));
}

void Scenario::validate() const {
  plant.validate();
  gains.validate();
  sim.validate();
  if (!std::isfinite(z0) || z0 <= 0.0) {
    throw std::invalid_argument("Scenario: z0 must be finite and > 0");
  }
  if (!std::isfinite(initial_state.h1) || !std::isfinite(initial_state.h3) ||
      initial_state.h1 < 0.0 || initial_state.h1 > plant.h0 ||
      initial_state.h3 < 0.0 || initial_state.h3 > plant.h0) {
    throw std::invalid_argument("Scenario: initial levels must lie in [0, h0]");
  }
  if (setpoints.empty()) {
    if (sim.samples() > 0) {
      throw std::invalid_argument("Scenario: at least one setpoint required");
    }
  } else if (setpoints.front().t != 0.0) {
    throw std::invalid_argument("Scenario: first setpoint must be at t = 0");
  }
  const double bound = max_feasible_h1ref(plant) / plant.h0;
  for (std::size_t i = 0; i < setpoints.size(); ++i) {
    const auto& sp = setpoints[i];
    if (i > 0 && !(sp.t > setpoints[i - 1].t)) {
      throw std::invalid_argument(
          "Scenario: setpoint times must be strictly increasing");
    }
    if (!std::isfinite(sp.fraction) || sp.fraction <= 0.0 ||
        sp.fraction > 1.0) {
      std::ostringstream msg;
      msg << "Scenario: setpoint fraction " << sp.fraction
          << " outside (0, 1]";
      throw std::invalid_argument(msg.str());
    }
    if (sp.fraction > bound) {
      std::ostringstream msg;
      msg << "Scenario: setpoint fraction " << sp.fraction
          << " is infeasible; the pump limit Q0 = " << plant.Q0
          << " m^3/s bounds the fraction at " << bound;
      throw InfeasibleSetpoint(msg.str(), bound * plant.h0);
    }
  }
  for (const auto& f : faults) {
    if (!std::isfinite(f.t_start) || f.t_start < 0.0 ||
        !std::isfinite(f.magnitude)) {
      throw std::invalid_argument("Scenario: fault needs finite t_start >= 0");
    }
    const bool scale =
        f.kind == FaultKind::scale_c1 || f.kind == FaultKind::scale_c2;
    if (scale && f.magnitude <= 0.0) {
      throw std::invalid_argument("Scenario: scale factor must be > 0");
    }
    if (f.kind == FaultKind::leak_tank1 && f.magnitude < 0.0) {
      throw std::invalid_argument("Scenario: leak rate must be >= 0");
    }
  }
}

PlantTruth effective_plant(const Scenario& scenario, double t) {
  PlantTruth truth{scenario.plant, 0.0, 0.0};
  for (const auto& f : scenario.faults) {
    if (f.t_start > t) continue;
    switch (f.kind) {
      case FaultKind::scale_c1:
        truth.params.c1 *= f.magnitude;
        break;
      case FaultKind::scale_c2:
        truth.params.c2 *= f.magnitude;
        break;
      case FaultKind::inflow_bias:
        truth.inflow_bias += f.magnitude;
        break;
      case FaultKind::leak_tank1:
        truth.leak += f.magnitude;
        break;
    }
  }
  return truth;
}

double delivered_inflow(double Qi, const PlantTruth& truth) {
  return std::max(Qi + truth.inflow_bias, 0.0) - truth.leak;
}

PlantState integrate_step(const PlantState& state, double inflow,
                          const PlantParams& p, double dt, Integrator method) {
  PlantState next;
  if (method == Integrator::euler) {
    next = axpy(state, dt, derivatives(state, inflow, p));
  } else {
    const StateDerivative k1 = derivatives(state, inflow, p);
    const StateDerivative k2 =
        derivatives(axpy(state, 0.5 * dt, k1), inflow, p);
    const StateDerivative k3 =
        derivatives(axpy(state, 0.5 * dt, k2), inflow, p);
    const StateDerivative k4 = derivatives(axpy(state, dt, k3), inflow, p);
    next.h1 = state.h1 +
              dt / 6.0 * (k1.dh1 + 2.0 * k2.dh1 + 2.0 * k3.dh1 + k4.dh1);
    next.h3 = state.h3 +
              dt / 6.0 * (k1.dh3 + 2.0 * k2.dh3 + 2.0 * k3.dh3 + k4.dh3);
  }
  if (!is_finite(next)) {
    throw DomainError("integrate_step: non-finite state");
  }
  return saturate_state(next, p);
}

RunSummary summarize(std::span<const TrajectoryRow> rows,
                     const CertificationReport& certification) {
  RunSummary summary;
  summary.lyapunov_violations = certification.violations.size();

  std::size_t saturated = 0;
  for (const auto& r : rows) {
    summary.max_abs_v = std::max(summary.max_abs_v, std::abs(r.v));
    summary.guard_activations += static_cast<std::size_t>(r.guard_count);
    if (r.saturated) ++saturated;
  }
  if (!rows.empty()) {
    summary.saturation_duty_pct = 100.0 * static_cast<double>(saturated) /
                                  static_cast<double>(rows.size());
  }

  std::size_t begin = 0;
  while (begin < rows.size()) {
    std::size_t end = begin;
    while (end < rows.size() && rows[end].epoch == rows[begin].epoch) ++end;
    const auto epoch = rows.subspan(begin, end - begin);

    EpochMetrics m;
    m.t_start = epoch.front().t;
    m.t_end = epoch.back().t;
    m.h1ref = epoch.front().h1ref;

    const double band = kSettlingBand * m.h1ref;
    std::optional<std::size_t> last_out;
    std::size_t sat = 0;
    double h1_max = epoch.front().h1;
    double h1_min = epoch.front().h1;
    for (std::size_t i = 0; i < epoch.size(); ++i) {
      const auto& r = epoch[i];
      if (std::abs(r.h1 - m.h1ref) > band) last_out = i;
      if (r.saturated) ++sat;
      m.max_abs_v = std::max(m.max_abs_v, std::abs(r.v));
      h1_max = std::max(h1_max, r.h1);
      h1_min = std::min(h1_min, r.h1);
    }
    if (!last_out) {
      m.settling_time = 0.0;
    } else if (*last_out + 1 < epoch.size()) {
      m.settling_time = epoch[*last_out + 1].t - m.t_start;
    }

    const double step = m.h1ref - epoch.front().h1;
    if (step > 0.0) {
      m.overshoot_pct = 100.0 * std::max(h1_max - m.h1ref, 0.0) / step;
    } else if (step < 0.0) {
      m.overshoot_pct = 100.0 * std::max(m.h1ref - h1_min, 0.0) / -step;
    }

    const std::size_t tail = std::max<std::size_t>(
        1, static_cast<std::size_t>(
               std::ceil(0.1 * static_cast<double>(epoch.size()))));
    for (std::size_t i = epoch.size() - tail; i < epoch.size(); ++i) {
      m.steady_state_error =
          std::max(m.steady_state_error, std::abs(epoch[i].h1 - m.h1ref));
    }
    m.saturation_duty_pct = 100.0 * static_cast<double>(sat) /
                            static_cast<double>(epoch.size());
    summary.epochs.push_back(m);
    begin = end;
  }
  return summary;
}

RunResult run(const Scenario& scenario) {
  return run(scenario, control_v);
}

RunResult run(const Scenario& scenario, const ControlLaw& law) {
  scenario.validate();
  const SimConfig& sim = scenario.sim;
  const DerivedParams dp = DerivedParams::from(scenario.plant);
  const std::size_t samples = sim.samples();
  const int substeps = sim.substeps();

  RunResult result;
  result.rows.reserve(samples);

  PlantState state = scenario.initial_state;
  std::size_t epoch = 0;
  ReferencePoint ref;

  for (std::size_t k = 0; k < samples; ++k) {
    const double t = static_cast<double>(k) * sim.ts;
    const std::size_t active = active_setpoint(scenario.setpoints, t, sim.ts);
    if (k == 0 || active != epoch) {
      epoch = active;
      ref = make_reference(scenario.setpoints[epoch].fraction *
                               scenario.plant.h0,
                           scenario.plant, scenario.z0);
    }

    const GuardedErrorState eg = to_error_guarded(state, ref);
    const ControlOutput out = law(eg.eta, scenario.gains, ref, dp, ref.u_s);

    TrajectoryRow row;
    row.t = t;
    row.h1 = state.h1;
    row.h3 = state.h3;
    row.h1ref = ref.h1ref;
    row.Qi = out.Qi;
    row.Qi_raw = out.Qi_raw;
    row.u_s = out.u_s;
    row.v = out.v;
    row.eta1 = eg.eta.eta1;
    row.eta2 = eg.eta.eta2;
    row.y = out.y;
    row.saturated = out.saturated;
    row.guard_count = out.guard_count() + (eg.clamped ? 1 : 0);
    row.epoch = static_cast<int>(epoch);

    const auto lyapunov_value = [&](const PlantState& s) {
      const ErrorState eta = to_error_guarded(s, ref).eta;
      const LawTerms terms = law_terms(eta, scenario.gains, ref, dp, ref.u_s);
      return eval_W(eta.eta1) + 0.5 * terms.y * terms.y;
    };
    row.V = lyapunov_value(state);
    const double v_applied = out.Qi / ref.Q0 - ref.u_s;
    row.Vdot_analytic = eval_Vdot_along(eg.eta, v_applied, scenario.gains,
                                        ref, dp, ref.u_s);

    double v_sub[3] = {row.V, 0.0, 0.0};
    for (int j = 0; j < substeps; ++j) {
      const double t_sub = t + static_cast<double>(j) * sim.dt;
      const PlantTruth truth = effective_plant(scenario, t_sub);
      state = integrate_step(state, delivered_inflow(out.Qi, truth),
                             truth.params, sim.dt, sim.integrator);
      if (j < 2) v_sub[j + 1] = lyapunov_value(state);
    }
    row.Vdot_numeric =
        substeps >= 2 ? (-3.0 * v_sub[0] + 4.0 * v_sub[1] - v_sub[2]) /
                            (2.0 * sim.dt)
                      : (v_sub[1] - v_sub[0]) / sim.dt;

    result.rows.push_back(row);
  }

  result.certification = certify_trajectory(result.rows, scenario.gains);
  result.summary = summarize(result.rows, result.certification);
  return result;
}

std::vector<GainSweepRow> gain_sweep(const Scenario& scenario,
                                     std::span<const double> k_phi_values,
                                     std::span<const double> k_y_values,
                                     unsigned threads) {
  std::vector<GainSweepRow> table;
  for (double kp : k_phi_values) {
    for (double ky : k_y_values) table.push_back({Gains{kp, ky}, {}});
  }
  for (const auto& row : table) row.gains.validate();
  if (table.empty()) return table;

  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min<unsigned>(threads, static_cast<unsigned>(table.size()));

  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(threads);
  auto worker = [&](unsigned id) {
    try {
      for (std::size_t i = next++; i < table.size(); i = next++) {
        Scenario cell = scenario;
        cell.gains = table[i].gains;
        table[i].summary = run(cell).summary;
      }
    } catch (...) {
      errors[id] = std::current_exception();
      next = table.size();
    }
  };

  std::vector<std::jthread> pool;
  for (unsigned id = 0; id < threads; ++id) pool.emplace_back(worker, id);
  pool.clear();
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return table;
}

}  // namespace tanks

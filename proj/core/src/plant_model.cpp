#include "tanks/plant_model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "tanks/errors.hpp"

namespace tanks {

namespace {

void require_positive(double value, const char* name) {
  if (!std::isfinite(value) || value <= 0.0) {
    std::ostringstream msg;
    msg << "PlantParams: " << name << " must be finite and > 0 (got " << value
        << ")";
    throw std::invalid_argument(msg.str());
  }
}

}  // namespace

void PlantParams::validate() const {
  require_positive(A, "A");
  require_positive(c1, "c1");
  require_positive(c2, "c2");
  require_positive(Q0, "Q0");
  require_positive(h0, "h0");
}

double signed_sqrt(double x) {
  if (x > 0.0) return std::sqrt(x);
  if (x < 0.0) return -std::sqrt(-x);
  return 0.0;
}

double inter_tank_flow(const PlantState& state, const PlantParams& p) {
  return p.c1 * signed_sqrt(state.h1 - state.h3);
}

double outlet_flow(const PlantState& state, const PlantParams& p) {
  return p.c2 * std::sqrt(std::max(state.h3, 0.0));
}

StateDerivative derivatives(const PlantState& state, double inflow,
                            const PlantParams& p) {
  const double q13 = inter_tank_flow(state, p);
  const double q3 = outlet_flow(state, p);
  return {(inflow - q13) / p.A, (q13 - q3) / p.A};
}

Clamped saturate_input(double inflow, const PlantParams& p) {
  if (!std::isfinite(inflow)) {
    throw DomainError("saturate_input: non-finite inflow command");
  }
  if (inflow > p.Q0) return {p.Q0, true};
  if (inflow < 0.0) return {0.0, true};
  return {inflow, false};
}

PlantState saturate_state(const PlantState& state, const PlantParams& p) {
  if (!std::isfinite(state.h1) || !std::isfinite(state.h3)) {
    throw DomainError("saturate_state: non-finite level");
  }
  return {std::clamp(state.h1, 0.0, p.h0), std::clamp(state.h3, 0.0, p.h0)};
}

double max_feasible_h1ref(const PlantParams& p) {
  // Qss = c1 c2 sqrt(h1) / sqrt(c1^2 + c2^2) <= Q0
  const double c1s = p.c1 * p.c1;
  const double c2s = p.c2 * p.c2;
  const double actuator_bound = p.Q0 * p.Q0 * (c1s + c2s) / (c1s * c2s);
  return std::min(p.h0, actuator_bound);
}

Equilibrium equilibrium_from_h1ref(double h1ref, const PlantParams& p) {
  if (!std::isfinite(h1ref) || h1ref <= 0.0 || h1ref > p.h0) {
    std::ostringstream msg;
    msg << "equilibrium: h1ref = " << h1ref << " m outside (0, h0 = " << p.h0
        << " m]";
    throw std::invalid_argument(msg.str());
  }
  const double c1s = p.c1 * p.c1;
  const double c2s = p.c2 * p.c2;
  Equilibrium eq;
  eq.h3ref = h1ref * c1s / (c1s + c2s);
  eq.Qss = p.c2 * std::sqrt(eq.h3ref);
  if (eq.Qss > p.Q0) {
    const double bound = max_feasible_h1ref(p);
    std::ostringstream msg;
    msg << "equilibrium: h1ref = " << h1ref << " m needs Qss = " << eq.Qss
        << " m^3/s above the pump limit Q0 = " << p.Q0
        << " m^3/s; feasible h1ref <= " << bound << " m (fraction "
        << bound / p.h0 << " of h0)";
    throw InfeasibleSetpoint(msg.str(), bound);
  }
  return eq;
}

}  // namespace tanks

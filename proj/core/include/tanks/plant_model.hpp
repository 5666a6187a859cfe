#pragma once

// Two coupled tanks: the pump feeds T1, T1 drains into T3 through a pipe,
// T3 drains into the reservoir through a fully open valve.
//
//   dh1/dt = Qi/A - (c1/A) sgn(h1-h3) sqrt|h1-h3|
//   dh3/dt = (c1/A) sgn(h1-h3) sqrt|h1-h3| - (c2/A) sqrt(h3)

namespace tanks {

struct PlantParams {
  double A = 0.0154;      // tank cross-section (m^2)
  double c1 = 1.0167e-4;  // T1 -> T3 orifice coefficient (m^2.5/s)
  double c2 = 1.7253e-4;  // T3 outlet orifice coefficient (m^2.5/s)
  double Q0 = 1e-4;       // maximum pump flow (m^3/s)
  double h0 = 0.6;        // maximum level (m)

  /// Throws std::invalid_argument unless every field is finite and > 0.
  void validate() const;

  friend bool operator==(const PlantParams&, const PlantParams&) = default;
};

struct PlantState {
  double h1 = 0.0;  // m
  double h3 = 0.0;  // m

  friend bool operator==(const PlantState&, const PlantState&) = default;
};

struct StateDerivative {
  double dh1 = 0.0;  // m/s
  double dh3 = 0.0;  // m/s
};

/// A clamped value and whether the clamp was active.
struct Clamped {
  double value = 0.0;
  bool saturated = false;
};

/// sgn(x) * sqrt(|x|) with sgn(0) = 0.
double signed_sqrt(double x);

/// Orifice flow from T1 into T3 (m^3/s); negative when h3 > h1.
double inter_tank_flow(const PlantState& state, const PlantParams& p);

/// Outlet flow of T3 (m^3/s), with sqrt(max(h3, 0)).
double outlet_flow(const PlantState& state, const PlantParams& p);

StateDerivative derivatives(const PlantState& state, double inflow,
                            const PlantParams& p);

/// Clamp the pump command to [0, Q0]. Non-finite input throws DomainError.
Clamped saturate_input(double inflow, const PlantParams& p);

/// Clamp both levels to [0, h0]. Non-finite levels throw DomainError.
PlantState saturate_state(const PlantState& state, const PlantParams& p);

struct Equilibrium {
  double h3ref = 0.0;  // m
  double Qss = 0.0;    // m^3/s
};

/// Largest h1 whose equilibrium inflow does not exceed Q0, capped at h0.
double max_feasible_h1ref(const PlantParams& p);

/// Steady state with h1 = h1ref:
///   h3ref = h1ref c1^2 / (c1^2 + c2^2),  Qss = c2 sqrt(h3ref).
/// Throws std::invalid_argument for h1ref outside (0, h0] and
/// InfeasibleSetpoint when Qss > Q0.
Equilibrium equilibrium_from_h1ref(double h1ref, const PlantParams& p);

}  // namespace tanks

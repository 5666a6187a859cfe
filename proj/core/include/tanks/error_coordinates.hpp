#pragma once

#include "tanks/plant_model.hpp"

// Error coordinates of the coupled-tank model.
//
//   z1 = h3,            z3 = sqrt(h1 - h3)
//   eta1 = (z1 - z1r)/z0,  eta2 = (z3 - z3r)/z0
//
// In these coordinates the plant is in strict-feedback form
//
//   d(eta1)/dt = f(eta1) + g * eta2
//   d(eta2)/dt = f_a(eta1, eta2) + g_a(eta2) * v,   Qi = Q0 (u_s + v)

namespace tanks {

/// Divisions by z0*eta2 + z3r (= sqrt(h1 - h3)) are refused below this.
inline constexpr double kDenominatorFloor = 1e-9;

/// |h1 - h3| below this maps to z3 = 0 in to_error.
inline constexpr double kLevelTieTolerance = 1e-12;

struct DerivedParams {
  double a = 0.0;  // c1 / A
  double b = 0.0;  // c2 / A

  static DerivedParams from(const PlantParams& p) {
    return {p.c1 / p.A, p.c2 / p.A};
  }
};

struct ReferencePoint {
  double h1ref = 0.0;  // m
  double h3ref = 0.0;  // m
  double z1r = 0.0;    // = h3ref
  double z3r = 0.0;    // = sqrt(h1ref - h3ref)
  double z0 = 1.0;     // normalization scale
  double u_s = 0.0;    // static control, Qss / Q0
  // Plant constants the reference was built for.
  double A = 0.0;
  double Q0 = 0.0;
};

struct ErrorState {
  double eta1 = 0.0;
  double eta2 = 0.0;

  friend bool operator==(const ErrorState&, const ErrorState&) = default;
};

/// Builds the reference for a level setpoint h1ref (m). Errors from
/// equilibrium_from_h1ref propagate; z0 must be finite and > 0.
ReferencePoint make_reference(double h1ref, const PlantParams& p,
                              double z0 = 1.0);

/// Throws DomainError when h1 < h3 - kLevelTieTolerance.
ErrorState to_error(const PlantState& state, const ReferencePoint& ref);

struct GuardedErrorState {
  ErrorState eta;
  bool clamped = false;  // h1 < h3 was mapped to z3 = 0
};

/// Same as to_error, but h1 < h3 is clamped to z3 = 0 and reported.
GuardedErrorState to_error_guarded(const PlantState& state,
                                   const ReferencePoint& ref);

/// Throws DomainError when z0*eta1 + z1r < 0 or z0*eta2 + z3r < 0.
PlantState from_error(const ErrorState& eta, const ReferencePoint& ref);

/// f(eta1) = -(b/z0) sqrt(z0 eta1 + z1r) + (a/z0) z3r
double eval_f(double eta1, const ReferencePoint& ref, const DerivedParams& dp);

/// g = a
double eval_g(const DerivedParams& dp);

/// Drift of the eta2 dynamics with v = 0:
///   f_a = (b/(2 z0)) sqrt(z0 eta1 + z1r)/(z0 eta2 + z3r) - a/z0
///         + (Q0/(2 A z0)) u_s/(z0 eta2 + z3r)
double eval_f_a(const ErrorState& eta, const ReferencePoint& ref,
                const DerivedParams& dp, double u_s);

/// g_a = Q0 / (2 A z0 (z0 eta2 + z3r))
double eval_g_a(double eta2, const ReferencePoint& ref);

}  // namespace tanks

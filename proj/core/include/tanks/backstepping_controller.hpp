#pragma once

#include <cstdint>

#include "tanks/error_coordinates.hpp"

// Backstepping level controller.
//
// The fictitious control phi(eta1) makes the eta1 subsystem exponentially
// stable for eta2 = phi; the real input then drives y = eta2 - phi(eta1)
// to zero. With W = eta1^2/2 and V = W + y^2/2 the closed loop satisfies
//
//   dV/dt = -k_phi eta1^2 - k_y y^2.

namespace tanks {

struct Gains {
  double k_phi = 0.02;  // fictitious-loop gain (1/s)
  double k_y = 0.03;    // backstepping gain (1/s)

  /// Throws std::invalid_argument unless both gains are finite and > 0.
  void validate() const;

  friend bool operator==(const Gains&, const Gains&) = default;
};

/// Bit flags for singularity guards that changed the evaluated law.
enum Guard : std::uint8_t {
  kGuardNone = 0,
  kGuardSlopeFloor = 1 << 0,   // sqrt(z0 eta1 + z1r) floored inside dphi/deta1
  kGuardDenominator = 1 << 1,  // z0 eta2 + z3r below kDenominatorFloor
  kGuardEmptyTank3 = 1 << 2,   // z0 eta1 + z1r slightly negative, set to 0
};

/// Floor on sqrt(z0 eta1 + z1r) in the slope of phi.
inline constexpr double kSlopeSqrtFloor = 1e-9;

struct ControlOutput {
  double u_s = 0.0;     // static part (dimensionless)
  double v = 0.0;       // dynamic part (dimensionless)
  double y = 0.0;       // eta2 - phi(eta1)
  double phi = 0.0;     // fictitious control value
  double Qi_raw = 0.0;  // Q0 (u_s + v), m^3/s
  double Qi = 0.0;      // after saturation, m^3/s
  bool saturated = false;
  std::uint8_t guards = kGuardNone;

  int guard_count() const;
};

/// u_s = a A z3r / Q0 (= Qss / Q0).
double static_control(const ReferencePoint& ref, const DerivedParams& dp);

/// phi(eta1) = (-f(eta1) - k_phi eta1) / g
double phi(double eta1, const Gains& gains, const ReferencePoint& ref,
           const DerivedParams& dp);

/// d(phi)/d(eta1) = (b / (2 sqrt(z0 eta1 + z1r)) - k_phi) / a.
/// Throws DomainError when sqrt(z0 eta1 + z1r) <= kSlopeSqrtFloor.
double phi_slope(double eta1, const Gains& gains, const ReferencePoint& ref,
                 const DerivedParams& dp);

/// Time derivative of phi along the eta1 flow: phi_slope * (f + g eta2).
double phi_derivative(const ErrorState& eta, const Gains& gains,
                      const ReferencePoint& ref, const DerivedParams& dp);

/// Every intermediate quantity of the law at one error state, evaluated with
/// the singularity guards applied. The lyapunov monitor uses the same terms
/// so that both agree on guarded samples.
struct LawTerms {
  double f = 0.0;
  double g = 0.0;
  double f_a = 0.0;
  double g_a = 0.0;
  double phi = 0.0;
  double phi_dot = 0.0;
  double y = 0.0;
  std::uint8_t guards = kGuardNone;
};

LawTerms law_terms(const ErrorState& eta, const Gains& gains,
                   const ReferencePoint& ref, const DerivedParams& dp,
                   double u_s);

/// v = g_a^{-1} (phi_dot - eta1 g - f_a - k_y y), Qi = sat(Q0 (u_s + v)).
///
/// When z0 eta2 + z3r < kDenominatorFloor (h1 == h3, e.g. empty tanks) the
/// model gives g_a = inf and the law reduces to Qi <= 0, which would hold
/// the rig empty forever. The dynamic part is then dropped (v = 0) and
/// kGuardDenominator is set.
ControlOutput control_v(const ErrorState& eta, const Gains& gains,
                        const ReferencePoint& ref, const DerivedParams& dp,
                        double u_s);

// Term-by-term evaluation of the closed-form controller as printed:
//
//   v = 2 A z0 (z0 eta2 + z3r)/Q0 * (v_i - eta1 a - k_y y - v_ii + trailing)
//
// "printed" evaluates each token literally; "corrected" applies the three
// readings that make it coincide with control_v:
//   v_i:   (b/(2a) * 1/sqrt(z0 eta1 + z1r) - k_phi/a) (a y - k_phi eta1)
//   v_ii:  (b sqrt(z0 eta1 + z1r) + a z3r) / (2 z0 (z0 eta2 + z3r))
//   trailing: a / z0
// The trailing "z/z0" token has no printed meaning and is reported as NaN.
struct TermCheck {
  double generic = 0.0;    // matching quantity of the generic law
  double printed = 0.0;    // literal transcription
  double corrected = 0.0;  // transcription after correction
};

struct TranscriptionReport {
  TermCheck v_i;       // generic: phi_dot
  TermCheck v_ii;      // generic: f_a + a/z0
  TermCheck trailing;  // generic: a/z0
  double v_generic = 0.0;
  double v_corrected = 0.0;
};

TranscriptionReport compare_with_transcribed_law(const ErrorState& eta,
                                                 const Gains& gains,
                                                 const ReferencePoint& ref,
                                                 const DerivedParams& dp);

}  // namespace tanks

#include "tanks/backstepping_controller.hpp"

#include <bit>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "tanks/errors.hpp"

namespace tanks {

namespace {

// Rounding in to_error can leave z0*eta1 + z1r a few ulp below zero when
// tank T3 is empty; anything more negative is a caller error.
constexpr double kNegativeArgTolerance = 1e-12;

}  // namespace

void Gains::validate() const {
  if (!std::isfinite(k_phi) || k_phi <= 0.0 || !std::isfinite(k_y) ||
      k_y <= 0.0) {
    std::ostringstream msg;
    msg << "Gains: k_phi and k_y must be finite and > 0 (got " << k_phi << ", "
        << k_y << ")";
    throw std::invalid_argument(msg.str());
  }
}

int ControlOutput::guard_count() const { return std::popcount(guards); }

double static_control(const ReferencePoint& ref, const DerivedParams& dp) {
  return dp.a * ref.A * ref.z3r / ref.Q0;
}

double phi(double eta1, const Gains& gains, const ReferencePoint& ref,
           const DerivedParams& dp) {
  return (-eval_f(eta1, ref, dp) - gains.k_phi * eta1) / eval_g(dp);
}

double phi_slope(double eta1, const Gains& gains, const ReferencePoint& ref,
                 const DerivedParams& dp) {
  const double arg = ref.z0 * eta1 + ref.z1r;
  const double root = arg > 0.0 ? std::sqrt(arg) : 0.0;
  if (root <= kSlopeSqrtFloor) {
    throw DomainError("phi_slope: sqrt(z0*eta1 + z1r) at or below the floor");
  }
  return (dp.b / (2.0 * root) - gains.k_phi) / dp.a;
}

double phi_derivative(const ErrorState& eta, const Gains& gains,
                      const ReferencePoint& ref, const DerivedParams& dp) {
  const double eta1_rate = eval_f(eta.eta1, ref, dp) + eval_g(dp) * eta.eta2;
  return phi_slope(eta.eta1, gains, ref, dp) * eta1_rate;
}

LawTerms law_terms(const ErrorState& eta, const Gains& gains,
                   const ReferencePoint& ref, const DerivedParams& dp,
                   double u_s) {
  LawTerms t;
  const double z0 = ref.z0;

  double arg = z0 * eta.eta1 + ref.z1r;
  if (arg < 0.0) {
    if (arg < -kNegativeArgTolerance) {
      std::ostringstream msg;
      msg << "law_terms: z0*eta1 + z1r = " << arg << " < 0";
      throw DomainError(msg.str());
    }
    arg = 0.0;
    t.guards |= kGuardEmptyTank3;
  }
  const double root = std::sqrt(arg);

  double den = z0 * eta.eta2 + ref.z3r;
  if (den < kDenominatorFloor) {
    den = kDenominatorFloor;
    t.guards |= kGuardDenominator;
  }

  t.g = dp.a;
  t.f = (-dp.b * root + dp.a * ref.z3r) / z0;
  t.g_a = ref.Q0 / (2.0 * ref.A * z0 * den);
  t.f_a = dp.b / (2.0 * z0) * root / den - dp.a / z0 +
          ref.Q0 / (2.0 * ref.A * z0) * u_s / den;

  t.phi = (-t.f - gains.k_phi * eta.eta1) / t.g;
  t.y = eta.eta2 - t.phi;

  double slope_root = root;
  if (slope_root <= kSlopeSqrtFloor) {
    slope_root = kSlopeSqrtFloor;
    t.guards |= kGuardSlopeFloor;
  }
  const double slope = (dp.b / (2.0 * slope_root) - gains.k_phi) / dp.a;
  t.phi_dot = slope * (t.f + t.g * eta.eta2);
  return t;
}

ControlOutput control_v(const ErrorState& eta, const Gains& gains,
                        const ReferencePoint& ref, const DerivedParams& dp,
                        double u_s) {
  const LawTerms t = law_terms(eta, gains, ref, dp, u_s);

  ControlOutput out;
  out.u_s = u_s;
  out.y = t.y;
  out.phi = t.phi;
  out.guards = t.guards;
  if ((t.guards & kGuardDenominator) == 0) {
    out.v = (t.phi_dot - eta.eta1 * t.g - t.f_a - gains.k_y * t.y) / t.g_a;
  }
  out.Qi_raw = ref.Q0 * (u_s + out.v);

  // Saturate against the reference's own pump limit.
  if (!std::isfinite(out.Qi_raw)) {
    throw DomainError("control_v: non-finite inflow command");
  }
  if (out.Qi_raw > ref.Q0) {
    out.Qi = ref.Q0;
    out.saturated = true;
  } else if (out.Qi_raw < 0.0) {
    out.Qi = 0.0;
    out.saturated = true;
  } else {
    out.Qi = out.Qi_raw;
  }
  return out;
}

TranscriptionReport compare_with_transcribed_law(const ErrorState& eta,
                                                 const Gains& gains,
                                                 const ReferencePoint& ref,
                                                 const DerivedParams& dp) {
  const double z0 = ref.z0;
  const double a = dp.a;
  const double b = dp.b;
  const double kp = gains.k_phi;
  const double root = std::sqrt(z0 * eta.eta1 + ref.z1r);
  const double den = z0 * eta.eta2 + ref.z3r;

  const double y = eta.eta2 - phi(eta.eta1, gains, ref, dp);
  const double rate_factor = a * y - kp * eta.eta1;

  TranscriptionReport r;

  r.v_i.generic = phi_derivative(eta, gains, ref, dp);
  r.v_i.printed = (b / (2.0 * a) * root - kp / a) * rate_factor;
  r.v_i.corrected = (b / (2.0 * a) / root - kp / a) * rate_factor;

  r.v_ii.generic = eval_f_a(eta, ref, dp, ref.u_s) + a / z0;
  r.v_ii.printed = (b * root + a * ref.z3r) / (2.0 * z0 * root);
  r.v_ii.corrected = (b * root + a * ref.z3r) / (2.0 * z0 * den);

  r.trailing.generic = a / z0;
  r.trailing.printed = std::numeric_limits<double>::quiet_NaN();
  r.trailing.corrected = a / z0;

  const ControlOutput generic = control_v(eta, gains, ref, dp, ref.u_s);
  r.v_generic = generic.v;
  const double inv_g_a = 2.0 * ref.A * z0 * den / ref.Q0;
  r.v_corrected = inv_g_a * (r.v_i.corrected - eta.eta1 * a - gains.k_y * y -
                             r.v_ii.corrected + r.trailing.corrected);
  return r;
}

}  // namespace tanks

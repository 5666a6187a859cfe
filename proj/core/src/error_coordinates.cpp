#include "tanks/error_coordinates.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "tanks/backstepping_controller.hpp"
#include "tanks/errors.hpp"

namespace tanks {

namespace {

double checked_sqrt_arg(double eta1, const ReferencePoint& ref,
                        const char* who) {
  const double arg = ref.z0 * eta1 + ref.z1r;
  if (!(arg >= 0.0)) {
    std::ostringstream msg;
    msg << who << ": z0*eta1 + z1r = " << arg << " < 0 (h3 below empty)";
    throw DomainError(msg.str());
  }
  return arg;
}

double checked_denominator(double eta2, const ReferencePoint& ref,
                           const char* who) {
  const double den = ref.z0 * eta2 + ref.z3r;
  if (!(den > kDenominatorFloor)) {
    std::ostringstream msg;
    msg << who << ": z0*eta2 + z3r = " << den << " below " << kDenominatorFloor;
    throw DomainError(msg.str());
  }
  return den;
}

}  // namespace

ReferencePoint make_reference(double h1ref, const PlantParams& p, double z0) {
  if (!std::isfinite(z0) || z0 <= 0.0) {
    throw std::invalid_argument("make_reference: z0 must be finite and > 0");
  }
  const Equilibrium eq = equilibrium_from_h1ref(h1ref, p);
  ReferencePoint ref;
  ref.h1ref = h1ref;
  ref.h3ref = eq.h3ref;
  ref.z1r = eq.h3ref;
  ref.z3r = std::sqrt(h1ref - eq.h3ref);
  ref.z0 = z0;
  ref.A = p.A;
  ref.Q0 = p.Q0;
  ref.u_s = static_control(ref, DerivedParams::from(p));
  return ref;
}

ErrorState to_error(const PlantState& state, const ReferencePoint& ref) {
  const double diff = state.h1 - state.h3;
  if (diff < -kLevelTieTolerance) {
    std::ostringstream msg;
    msg << "to_error: h1 = " << state.h1 << " < h3 = " << state.h3;
    throw DomainError(msg.str());
  }
  const double z3 = diff > kLevelTieTolerance ? std::sqrt(diff) : 0.0;
  return {(state.h3 - ref.z1r) / ref.z0, (z3 - ref.z3r) / ref.z0};
}

GuardedErrorState to_error_guarded(const PlantState& state,
                                   const ReferencePoint& ref) {
  const double diff = state.h1 - state.h3;
  GuardedErrorState out;
  out.clamped = diff < 0.0;
  const double z3 = diff > 0.0 ? std::sqrt(diff) : 0.0;
  out.eta = {(state.h3 - ref.z1r) / ref.z0, (z3 - ref.z3r) / ref.z0};
  return out;
}

PlantState from_error(const ErrorState& eta, const ReferencePoint& ref) {
  const double z1 = ref.z0 * eta.eta1 + ref.z1r;
  const double z3 = ref.z0 * eta.eta2 + ref.z3r;
  if (z1 < 0.0 || z3 < 0.0) {
    throw DomainError("from_error: error state maps outside z1 >= 0, z3 >= 0");
  }
  return {z1 + z3 * z3, z1};
}

double eval_f(double eta1, const ReferencePoint& ref, const DerivedParams& dp) {
  const double arg = checked_sqrt_arg(eta1, ref, "eval_f");
  return (-dp.b * std::sqrt(arg) + dp.a * ref.z3r) / ref.z0;
}

double eval_g(const DerivedParams& dp) { return dp.a; }

double eval_f_a(const ErrorState& eta, const ReferencePoint& ref,
                const DerivedParams& dp, double u_s) {
  const double arg = checked_sqrt_arg(eta.eta1, ref, "eval_f_a");
  const double den = checked_denominator(eta.eta2, ref, "eval_f_a");
  const double z0 = ref.z0;
  return dp.b / (2.0 * z0) * std::sqrt(arg) / den - dp.a / z0 +
         ref.Q0 / (2.0 * ref.A * z0) * u_s / den;
}

double eval_g_a(double eta2, const ReferencePoint& ref) {
  const double den = checked_denominator(eta2, ref, "eval_g_a");
  return ref.Q0 / (2.0 * ref.A * ref.z0 * den);
}

}  // namespace tanks

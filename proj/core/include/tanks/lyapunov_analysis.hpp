#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "tanks/backstepping_controller.hpp"
#include "tanks/trajectory.hpp"

namespace tanks {

struct LyapunovSample {
  double t = 0.0;
  double W = 0.0;
  double V = 0.0;
  double Vdot_analytic = 0.0;
  double Vdot_numeric = 0.0;
  bool unsaturated = true;
};

/// W(eta1) = eta1^2 / 2
double eval_W(double eta1);

/// V = W(eta1) + (eta2 - phi(eta1))^2 / 2
double eval_V(const ErrorState& eta, const Gains& gains,
              const ReferencePoint& ref, const DerivedParams& dp);

/// dV/dt under the unsaturated law: eta1 (f + g phi) - k_y y^2.
double eval_Vdot_analytic(const ErrorState& eta, const Gains& gains,
                          const ReferencePoint& ref, const DerivedParams& dp);

/// -k_phi eta1^2 - k_y y^2, the closed form of eval_Vdot_analytic.
double eval_Vdot_closed_form(const ErrorState& eta, const Gains& gains,
                             const ReferencePoint& ref,
                             const DerivedParams& dp);

/// dV/dt along the model error dynamics for an arbitrary applied v:
///   eta1 (f + g eta2) + y (f_a + g_a v - phi_dot).
/// Uses law_terms, so guarded states give finite values.
double eval_Vdot_along(const ErrorState& eta, double v_applied,
                       const Gains& gains, const ReferencePoint& ref,
                       const DerivedParams& dp, double u_s);

/// Per-row Lyapunov view of a trajectory.
std::vector<LyapunovSample> lyapunov_samples(
    std::span<const TrajectoryRow> rows);

struct CertificationTolerance {
  double abs = 1e-10;           // k_phi eta1^2 + k_y y^2 at or below: origin
  double rel = 1e-6;            // require Vdot < -rel * (k_phi eta1^2 + k_y y^2)
  double monotone_step = 1e-8;  // allowed V increase between samples
};

struct Violation {
  std::size_t index = 0;
  double t = 0.0;
  double vdot = 0.0;
  double bound = 0.0;  // k_phi eta1^2 + k_y y^2 at the sample
};

struct CertificationReport {
  std::vector<Violation> violations;
  // Rows i where V grew over an interval held at an unsaturated, unguarded
  // input within one epoch.
  std::vector<std::size_t> monotonicity_violations;
  std::size_t checked = 0;
  std::size_t near_origin = 0;
  std::size_t saturated = 0;
  std::size_t guarded = 0;

  bool certified() const {
    return violations.empty() && monotonicity_violations.empty();
  }
};

/// Checks decrease of V on every unsaturated, unguarded, off-origin row.
/// Throws std::invalid_argument on a malformed trajectory (non-finite
/// values, time not strictly increasing).
CertificationReport certify_trajectory(std::span<const TrajectoryRow> rows,
                                       const Gains& gains,
                                       const CertificationTolerance& tol = {});

}  // namespace tanks

#include "tanks/lyapunov_analysis.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace tanks {

double eval_W(double eta1) { return 0.5 * eta1 * eta1; }

double eval_V(const ErrorState& eta, const Gains& gains,
              const ReferencePoint& ref, const DerivedParams& dp) {
  const double y = eta.eta2 - phi(eta.eta1, gains, ref, dp);
  return eval_W(eta.eta1) + 0.5 * y * y;
}

double eval_Vdot_analytic(const ErrorState& eta, const Gains& gains,
                          const ReferencePoint& ref, const DerivedParams& dp) {
  const double fictitious = phi(eta.eta1, gains, ref, dp);
  const double y = eta.eta2 - fictitious;
  return eta.eta1 * (eval_f(eta.eta1, ref, dp) + eval_g(dp) * fictitious) -
         gains.k_y * y * y;
}

double eval_Vdot_closed_form(const ErrorState& eta, const Gains& gains,
                             const ReferencePoint& ref,
                             const DerivedParams& dp) {
  const double y = eta.eta2 - phi(eta.eta1, gains, ref, dp);
  return -gains.k_phi * eta.eta1 * eta.eta1 - gains.k_y * y * y;
}

double eval_Vdot_along(const ErrorState& eta, double v_applied,
                       const Gains& gains, const ReferencePoint& ref,
                       const DerivedParams& dp, double u_s) {
  const LawTerms t = law_terms(eta, gains, ref, dp, u_s);
  const double eta1_rate = t.f + t.g * eta.eta2;
  const double y_rate = t.f_a + t.g_a * v_applied - t.phi_dot;
  return eta.eta1 * eta1_rate + t.y * y_rate;
}

std::vector<LyapunovSample> lyapunov_samples(
    std::span<const TrajectoryRow> rows) {
  std::vector<LyapunovSample> out;
  out.reserve(rows.size());
  for (const auto& r : rows) {
    out.push_back({r.t, eval_W(r.eta1), r.V, r.Vdot_analytic, r.Vdot_numeric,
                   !r.saturated});
  }
  return out;
}

CertificationReport certify_trajectory(std::span<const TrajectoryRow> rows,
                                       const Gains& gains,
                                       const CertificationTolerance& tol) {
  gains.validate();
  CertificationReport report;

  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i];
    if (!std::isfinite(r.t) || !std::isfinite(r.eta1) || !std::isfinite(r.y) ||
        !std::isfinite(r.V) || !std::isfinite(r.Vdot_analytic)) {
      std::ostringstream msg;
      msg << "certify_trajectory: non-finite value in row " << i;
      throw std::invalid_argument(msg.str());
    }
    if (i > 0 && !(r.t > rows[i - 1].t)) {
      std::ostringstream msg;
      msg << "certify_trajectory: time not increasing at row " << i;
      throw std::invalid_argument(msg.str());
    }

    if (r.saturated) {
      ++report.saturated;
      continue;
    }
    if (r.guard_count > 0) {
      ++report.guarded;
      continue;
    }
    const double bound = gains.k_phi * r.eta1 * r.eta1 + gains.k_y * r.y * r.y;
    if (bound <= tol.abs) {
      ++report.near_origin;
      continue;
    }
    ++report.checked;
    if (r.Vdot_analytic >= -tol.rel * bound) {
      report.violations.push_back({i, r.t, r.Vdot_analytic, bound});
    }
  }

  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto& prev = rows[i - 1];
    const auto& cur = rows[i];
    // The input held over [t_prev, t_cur) is the unmodified law.
    const bool clean = !prev.saturated && prev.guard_count == 0;
    if (!clean || prev.epoch != cur.epoch || prev.h1ref != cur.h1ref) continue;
    if (cur.V > prev.V + tol.monotone_step) {
      report.monotonicity_violations.push_back(i);
    }
  }
  return report;
}

}  // namespace tanks

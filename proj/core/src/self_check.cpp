#include "tanks/self_check.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <random>

#include "tanks/backstepping_controller.hpp"
#include "tanks/error_coordinates.hpp"
#include "tanks/lyapunov_analysis.hpp"

namespace tanks {

namespace {

struct Sample {
  ReferencePoint ref;
  PlantState state;
  double inflow = 0.0;
};

class SampleSource {
 public:
  SampleSource(const PlantParams& p, std::uint64_t seed) : p_(p), rng_(seed) {}

  double uniform(double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng_);
  }

  ReferencePoint reference() {
    const double top = max_feasible_h1ref(p_);
    return make_reference(uniform(0.1, 1.0) * top, p_, uniform(0.5, 2.0));
  }

  // Interior state with h1 > h3 > 0 and an inflow inside [0, Q0].
  Sample next() {
    Sample s;
    s.ref = reference();
    s.state.h3 = uniform(0.01, 0.8) * p_.h0;
    s.state.h1 = s.state.h3 + uniform(0.005, 1.0) * (p_.h0 - s.state.h3);
    s.inflow = uniform(0.0, p_.Q0);
    return s;
  }

 private:
  PlantParams p_;
  std::mt19937_64 rng_;
};

double bisect_h3(double h1ref, const PlantParams& p) {
  double lo = 0.0;
  double hi = h1ref;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double balance = p.c1 * std::sqrt(h1ref - mid) - p.c2 * std::sqrt(mid);
    (balance > 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

double rel(double a, double b) {
  const double scale = std::max(std::abs(a), std::abs(b));
  return scale == 0.0 ? 0.0 : std::abs(a - b) / scale;
}

CheckResult check_equilibrium(const PlantParams& p, SampleSource& src) {
  CheckResult r{"equilibrium residual and bisection cross-check", true, 0.0,
                1e-10, 0};
  for (int i = 0; i < 50; ++i) {
    const double h1ref = src.uniform(0.01, 1.0) * max_feasible_h1ref(p);
    const Equilibrium eq = equilibrium_from_h1ref(h1ref, p);
    const StateDerivative d = derivatives({h1ref, eq.h3ref}, eq.Qss, p);
    if (std::abs(d.dh1) >= 1e-12 || std::abs(d.dh3) >= 1e-12) r.passed = false;
    const double h3_bisect = bisect_h3(h1ref, p);
    const double q_bisect = p.c1 * std::sqrt(h1ref - h3_bisect);
    r.worst = std::max({r.worst, rel(eq.h3ref, h3_bisect), rel(eq.Qss, q_bisect)});
    ++r.samples;
  }
  r.passed = r.passed && r.worst < r.tolerance;
  return r;
}

CheckResult check_error_dynamics(const PlantParams& p, SampleSource& src) {
  CheckResult r{"error dynamics vs differentiated plant flow", true, 0.0, 1e-9,
                0};
  const DerivedParams dp = DerivedParams::from(p);
  for (int i = 0; i < 1000; ++i) {
    const Sample s = src.next();
    const StateDerivative flow = derivatives(s.state, s.inflow, p);
    const double reach = 1e-3 * std::min(s.state.h3, s.state.h1 - s.state.h3);
    const double delta =
        reach / std::max({std::abs(flow.dh1), std::abs(flow.dh3), 1e-300});
    const auto central = [&](double h) {
      const ErrorState plus = to_error(
          {s.state.h1 + h * flow.dh1, s.state.h3 + h * flow.dh3}, s.ref);
      const ErrorState minus = to_error(
          {s.state.h1 - h * flow.dh1, s.state.h3 - h * flow.dh3}, s.ref);
      return ErrorState{(plus.eta1 - minus.eta1) / (2.0 * h),
                        (plus.eta2 - minus.eta2) / (2.0 * h)};
    };
    const ErrorState coarse = central(delta);
    const ErrorState fine = central(0.5 * delta);
    const double fd1 = (4.0 * fine.eta1 - coarse.eta1) / 3.0;
    const double fd2 = (4.0 * fine.eta2 - coarse.eta2) / 3.0;

    const ErrorState eta = to_error(s.state, s.ref);
    const double u_s = s.ref.u_s;
    const double v = s.inflow / p.Q0 - u_s;
    const double rate1 = eval_f(eta.eta1, s.ref, dp) + eval_g(dp) * eta.eta2;
    const double rate2 =
        eval_f_a(eta, s.ref, dp, u_s) + eval_g_a(eta.eta2, s.ref) * v;

    const double z0 = s.ref.z0;
    const double z3 = std::sqrt(s.state.h1 - s.state.h3);
    const double root = std::sqrt(s.state.h3);
    const double scale1 = (dp.a * z3 + dp.b * root) / z0;
    const double scale2 = dp.b * root / (2.0 * z0 * z3) + dp.a / z0 +
                          s.inflow / (2.0 * p.A * z0 * z3);
    r.worst = std::max({r.worst, std::abs(rate1 - fd1) / scale1,
                        std::abs(rate2 - fd2) / scale2});
    ++r.samples;
  }
  r.passed = r.worst < r.tolerance;
  return r;
}

CheckResult check_phi_derivative(const PlantParams& p, SampleSource& src) {
  CheckResult r{"phi_dot vs central differences of phi", true, 0.0, 1e-5, 0};
  const DerivedParams dp = DerivedParams::from(p);
  for (int i = 0; i < 200; ++i) {
    const Sample s = src.next();
    const Gains gains{src.uniform(0.005, 0.5), src.uniform(0.005, 0.5)};
    const ErrorState eta = to_error(s.state, s.ref);
    const double h = 1e-6;
    const double slope_fd = (phi(eta.eta1 + h, gains, s.ref, dp) -
                             phi(eta.eta1 - h, gains, s.ref, dp)) /
                            (2.0 * h);
    const double eta1_rate = eval_f(eta.eta1, s.ref, dp) + eval_g(dp) * eta.eta2;
    const double analytic = phi_derivative(eta, gains, s.ref, dp);
    // Normalize by the two parts of the slope so that a near-zero slope does
    // not turn rounding into a large relative error.
    const double scale =
        (dp.b / (2.0 * std::sqrt(s.state.h3)) + gains.k_phi) / dp.a *
        std::abs(eta1_rate);
    r.worst = std::max(r.worst, std::abs(analytic - slope_fd * eta1_rate) /
                                    std::max(scale, 1e-300));
    ++r.samples;
  }
  r.passed = r.worst < r.tolerance;
  return r;
}

CheckResult check_lyapunov_identity(const PlantParams& p, SampleSource& src) {
  CheckResult r{"Lyapunov derivative identity", true, 0.0, 1e-9, 0};
  const DerivedParams dp = DerivedParams::from(p);
  for (int i = 0; i < 1000; ++i) {
    const Sample s = src.next();
    const Gains gains{src.uniform(0.005, 0.5), src.uniform(0.005, 0.5)};
    const ErrorState eta = to_error(s.state, s.ref);
    const double closed = eval_Vdot_closed_form(eta, gains, s.ref, dp);
    const double eq9 = eval_Vdot_analytic(eta, gains, s.ref, dp);
    const ControlOutput u = control_v(eta, gains, s.ref, dp, s.ref.u_s);
    const double along =
        eval_Vdot_along(eta, u.v, gains, s.ref, dp, s.ref.u_s);
    if (!(closed < 0.0)) r.passed = false;
    r.worst = std::max({r.worst, rel(eq9, closed), rel(along, closed)});
    ++r.samples;
  }
  r.passed = r.passed && r.worst < r.tolerance;
  return r;
}

CheckResult check_transcribed_law(const PlantParams& p, SampleSource& src) {
  CheckResult r{"generic law vs corrected closed-form transcription", true, 0.0,
                1e-9, 0};
  const DerivedParams dp = DerivedParams::from(p);
  for (int i = 0; i < 100; ++i) {
    const Sample s = src.next();
    const Gains gains{src.uniform(0.005, 0.5), src.uniform(0.005, 0.5)};
    const ErrorState eta = to_error(s.state, s.ref);
    const TranscriptionReport t =
        compare_with_transcribed_law(eta, gains, s.ref, dp);
    r.worst = std::max({r.worst, rel(t.v_generic, t.v_corrected),
                        rel(t.v_i.generic, t.v_i.corrected),
                        rel(t.v_ii.generic, t.v_ii.corrected)});
    ++r.samples;
  }
  r.passed = r.worst < r.tolerance;
  return r;
}

CheckResult check_fixed_point(const PlantParams& p, SampleSource& src) {
  CheckResult r{"law vanishes at the reference", true, 0.0, 1e-12, 0};
  const DerivedParams dp = DerivedParams::from(p);
  for (int i = 0; i < 50; ++i) {
    const ReferencePoint ref = src.reference();
    const Gains gains{src.uniform(0.005, 0.5), src.uniform(0.005, 0.5)};
    const ControlOutput u = control_v({0.0, 0.0}, gains, ref, dp, ref.u_s);
    r.worst = std::max({r.worst, std::abs(u.v), std::abs(u.y)});
    ++r.samples;
  }
  r.passed = r.worst < r.tolerance;
  return r;
}

}  // namespace

std::vector<CheckResult> run_self_checks(const PlantParams& plant,
                                         std::uint64_t seed) {
  plant.validate();
  SampleSource src(plant, seed);
  return {check_equilibrium(plant, src),      check_error_dynamics(plant, src),
          check_phi_derivative(plant, src),   check_lyapunov_identity(plant, src),
          check_transcribed_law(plant, src),  check_fixed_point(plant, src)};
}

bool report_self_checks(const std::vector<CheckResult>& results,
                        std::ostream& out) {
  bool all = true;
  for (const auto& r : results) {
    char line[160];
    std::snprintf(line, sizeof line, "[%s] %-52s worst=%.3e tol=%.1e n=%zu",
                  r.passed ? "PASS" : "FAIL", r.name.c_str(), r.worst,
                  r.tolerance, r.samples);
    out << line << '\n';
    all = all && r.passed;
  }
  return all;
}

}  // namespace tanks

#pragma once

// Test-only reference computations. Nothing here calls into the closed
// forms under test; the oracles work from the plant flow and from the
// coordinate transform alone.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>

#include "tanks/error_coordinates.hpp"
#include "tanks/plant_model.hpp"

namespace tanks::oracle {

// Frozen from a 30-digit bisection on c1 sqrt(h1 - h3) = c2 sqrt(h3) with the
// rig constants (mpmath).
inline constexpr double kH3ref80 = 0.12372167781188412;
inline constexpr double kQss80 = 6.0685861665669211e-5;
inline constexpr double kZ3r80 = 0.59689054456249839;
inline constexpr double kUs80 = 0.60685861665669211;
inline constexpr double kGa80 = 0.0054394449306162366;
inline constexpr double kH3ref50 = 0.077326048632427576;
inline constexpr double kQss50 = 4.7976386158353595e-5;
inline constexpr double kZ3r50 = 0.47188340865893179;
inline constexpr double kUs50 = 0.47976386158353595;
inline constexpr double kA = 0.0066019480519480519;  // c1 / A
inline constexpr double kB = 0.011203246753246753;   // c2 / A

/// Root of the flow balance c1 sqrt(h1ref - h3) - c2 sqrt(h3) on (0, h1ref).
inline double bisect_h3ref(double h1ref, const PlantParams& p) {
  double lo = 0.0;
  double hi = h1ref;
  while (true) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) return mid;
    const double balance = p.c1 * std::sqrt(h1ref - mid) - p.c2 * std::sqrt(mid);
    if (balance > 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
}

/// Richardson-extrapolated central difference of the error coordinates
/// along the plant vector field: d/dt to_error(x(t)).
inline ErrorState differentiated_error(const PlantState& s, double inflow,
                                       const PlantParams& p,
                                       const ReferencePoint& ref) {
  const StateDerivative flow = derivatives(s, inflow, p);
  const double reach = 1e-3 * std::min(s.h3, s.h1 - s.h3);
  const double delta =
      reach / std::max({std::abs(flow.dh1), std::abs(flow.dh3), 1e-300});
  const auto central = [&](double h) {
    const ErrorState fwd =
        to_error({s.h1 + h * flow.dh1, s.h3 + h * flow.dh3}, ref);
    const ErrorState bwd =
        to_error({s.h1 - h * flow.dh1, s.h3 - h * flow.dh3}, ref);
    return ErrorState{(fwd.eta1 - bwd.eta1) / (2.0 * h),
                      (fwd.eta2 - bwd.eta2) / (2.0 * h)};
  };
  const ErrorState coarse = central(delta);
  const ErrorState fine = central(0.5 * delta);
  return {(4.0 * fine.eta1 - coarse.eta1) / 3.0,
          (4.0 * fine.eta2 - coarse.eta2) / 3.0};
}

/// Random interior operating points: h1 > h3 > 0, inflow in [0, Q0],
/// random feasible reference and z0.
class StateSampler {
 public:
  explicit StateSampler(std::uint64_t seed, PlantParams p = {})
      : p_(p), rng_(seed) {}

  double uniform(double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng_);
  }

  PlantState state() {
    PlantState s;
    s.h3 = uniform(0.01, 0.8) * p_.h0;
    s.h1 = s.h3 + uniform(0.005, 1.0) * (p_.h0 - s.h3);
    return s;
  }

  ReferencePoint reference() {
    return make_reference(uniform(0.05, 1.0) * max_feasible_h1ref(p_), p_,
                          uniform(0.5, 2.0));
  }

  double inflow() { return uniform(0.0, p_.Q0); }

  const PlantParams& params() const { return p_; }

 private:
  PlantParams p_;
  std::mt19937_64 rng_;
};

/// |a - b| relative to the larger magnitude (0 when both vanish).
inline double rel_err(double a, double b) {
  const double scale = std::max(std::abs(a), std::abs(b));
  return scale == 0.0 ? 0.0 : std::abs(a - b) / scale;
}

}  // namespace tanks::oracle

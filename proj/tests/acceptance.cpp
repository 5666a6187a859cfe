// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "tanks/lyapunov_analysis.hpp"
#include "tanks/scenario_io.hpp"
#include "tanks/simulation_engine.hpp"

namespace {

using namespace tanks;

struct Outcome {
  bool passed = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

Scenario load(const char* name) {
  return parse_scenario(std::filesystem::path(TANKS_SCENARIO_DIR) / name);
}

const PlantParams kRig{};
const DerivedParams kDp = DerivedParams::from(kRig);

// Mean of h1 over the last 10 % of an epoch.
double settled_h1(const RunResult& r, int epoch) {
  std::vector<double> h;
  for (const auto& row : r.rows) {
    if (row.epoch == epoch) h.push_back(row.h1);
  }
  const std::size_t tail = std::max<std::size_t>(1, h.size() / 10);
  double sum = 0.0;
  for (std::size_t i = h.size() - tail; i < h.size(); ++i) sum += h[i];
  return sum / static_cast<double>(tail);
}

Outcome ac1() {
  oracle::StateSampler sampler(101);
  double worst_rate = 0.0;
  for (int i = 0; i < 50; ++i) {
    const double h1ref = sampler.uniform(1e-3, 1.0) * max_feasible_h1ref(kRig);
    const Equilibrium eq = equilibrium_from_h1ref(h1ref, kRig);
    const StateDerivative d = derivatives({h1ref, eq.h3ref}, eq.Qss, kRig);
    worst_rate = std::max({worst_rate, std::abs(d.dh1), std::abs(d.dh3)});
  }
  double worst_rel = 0.0;
  for (double h1ref : {0.48, 0.30}) {
    const double h3 = oracle::bisect_h3ref(h1ref, kRig);
    const double qss = kRig.c2 * std::sqrt(h3);
    const ReferencePoint ref = make_reference(h1ref, kRig);
    const Equilibrium eq = equilibrium_from_h1ref(h1ref, kRig);
    worst_rel = std::max({worst_rel, oracle::rel_err(eq.h3ref, h3),
                          oracle::rel_err(eq.Qss, qss),
                          oracle::rel_err(ref.u_s, qss / kRig.Q0)});
  }
  // Frozen high-precision values of the 80 % and 50 % operating points.
  worst_rel = std::max(
      {worst_rel,
       oracle::rel_err(equilibrium_from_h1ref(0.48, kRig).h3ref,
                       oracle::kH3ref80),
       oracle::rel_err(make_reference(0.48, kRig).u_s, oracle::kUs80),
       oracle::rel_err(equilibrium_from_h1ref(0.30, kRig).Qss,
                       oracle::kQss50),
       oracle::rel_err(make_reference(0.30, kRig).u_s, oracle::kUs50)});
  return {worst_rate < 1e-12 && worst_rel < 1e-10,
          fmt("max|dh| = %.2e m/s (tol 1e-12), max rel = %.2e (tol 1e-10)",
              worst_rate, worst_rel)};
}

Outcome ac2() {
  oracle::StateSampler sampler(202);
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const PlantState s = sampler.state();
    const ReferencePoint ref = sampler.reference();
    const double q = sampler.inflow();
    const ErrorState eta = to_error(s, ref);
    const ErrorState fd = oracle::differentiated_error(s, q, kRig, ref);
    const double v = q / kRig.Q0 - ref.u_s;
    const double f = eval_f(eta.eta1, ref, kDp);
    const double ge = eval_g(kDp) * eta.eta2;
    const double fa = eval_f_a(eta, ref, kDp, ref.u_s);
    const double gv = eval_g_a(eta.eta2, ref) * v;
    worst = std::max(
        {worst, std::abs(f + ge - fd.eta1) / (std::abs(f) + std::abs(ge)),
         std::abs(fa + gv - fd.eta2) / (std::abs(fa) + std::abs(gv))});
  }
  return {worst < 1e-9,
          fmt("1000 states, max rel = %.2e (tol 1e-9)", worst)};
}

Outcome ac3() {
  const Gains gains{};
  oracle::StateSampler sampler(303);
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const ReferencePoint ref = sampler.reference();
    const ErrorState eta = to_error(sampler.state(), ref);
    const ControlOutput out = control_v(eta, gains, ref, kDp, ref.u_s);
    const double closed = eval_Vdot_closed_form(eta, gains, ref, kDp);
    worst = std::max(
        worst,
        oracle::rel_err(eval_Vdot_analytic(eta, gains, ref, kDp), closed));
    // Along the model with the unsaturated law applied.
    worst = std::max(worst, oracle::rel_err(eval_Vdot_along(eta, out.v, gains,
                                                            ref, kDp, ref.u_s),
                                            closed));
  }
  Scenario s = load("nominal_80_50.ini");
  s.setpoints.resize(1);
  s.sim.t_end = 600.0;
  const RunResult r = run(s);
  const auto& c = r.certification;
  const bool ok = worst < 1e-9 && c.violations.empty() && c.checked > 0;
  return {ok, fmt("identity max rel = %.2e (tol 1e-9); 80%% run: %zu "
                  "violations over %zu unsaturated samples",
                  worst, c.violations.size(), c.checked)};
}

Outcome ac4() {
  const RunResult r = run(load("nominal_80_50.ini"));
  const auto& e = r.summary.epochs;
  if (e.size() != 2) return {false, "expected two epochs"};
  const bool ok = e[0].settling_time && e[1].settling_time &&
                  std::abs(e[0].h1ref - 0.48) < 1e-15 &&
                  std::abs(e[1].h1ref - 0.30) < 1e-15 &&
                  e[0].steady_state_error < 1e-3 &&
                  e[1].steady_state_error < 1e-3;
  const auto settle = [](const EpochMetrics& m) {
    return m.settling_time ? *m.settling_time : -1.0;
  };
  return {ok, fmt("0.48 m: settled %.0f s, sse %.2e m; 0.30 m: settled "
                  "%.0f s, sse %.2e m (tol 1e-3)",
                  settle(e[0]), e[0].steady_state_error, settle(e[1]),
                  e[1].steady_state_error)};
}

Outcome ac5() {
  const Scenario s = load("fault_c2.ini");
  const RunResult r = run(s);
  const double h1ref = s.setpoints.front().fraction * s.plant.h0;
  const double t_fault = s.faults.front().t_start;
  double lo = 1e9;
  double hi = -1e9;
  double tail_sum = 0.0;
  std::size_t tail_n = 0;
  bool finite = true;
  const double tail_start = s.sim.t_end - 200.0;
  for (const auto& row : r.rows) {
    finite = finite && std::isfinite(row.h1);
    if (row.t >= tail_start) {
      lo = std::min(lo, row.h1);
      hi = std::max(hi, row.h1);
      tail_sum += row.h1;
      ++tail_n;
    }
  }
  const double settled = tail_sum / static_cast<double>(tail_n);
  const double offset_pct = 100.0 * std::abs(settled - h1ref) / h1ref;
  const bool steady = hi - lo < 1e-4;
  const bool ok = finite && steady && tail_start > t_fault &&
                  offset_pct > 1e-2 && offset_pct < 5.0;
  return {ok, fmt("c2 x%.2f at %.0f s: h1 re-settles at %.5f m (spread "
                  "%.1e m over last 200 s), offset %.2f%% of setpoint "
                  "(need 0 < offset < 5%%)",
                  s.faults.front().magnitude, t_fault, settled, hi - lo,
                  offset_pct)};
}

Outcome ac6() {
  const Scenario s = load("sweep_80_to_50.ini");
  const std::vector<double> grid = {0.02, 0.05, 0.2};
  const auto table = gain_sweep(s, grid, grid);
  const auto cell = [&](std::size_t i, std::size_t j) -> const RunSummary& {
    return table[i * grid.size() + j].summary;
  };
  double worst_duty = 0.0;
  bool all_settled = true;
  for (const auto& row : table) {
    worst_duty = std::max(worst_duty, row.summary.saturation_duty_pct);
    all_settled = all_settled && row.summary.epochs[0].settling_time;
  }
  if (!all_settled) return {false, "a sweep cell did not settle"};

  bool ok = worst_duty < 5.0;
  std::string diag;
  // Increasing-gain diagonals of the 3x3 grid: (i, j) -> (i+1, j+1).
  const std::vector<std::pair<int, int>> starts = {{0, 0}, {0, 1}, {1, 0}};
  for (const auto& [i0, j0] : starts) {
    diag += " [";
    for (int i = i0, j = j0; i < 3 && j < 3; ++i, ++j) {
      const auto& c = cell(static_cast<std::size_t>(i),
                           static_cast<std::size_t>(j));
      diag += fmt("%s%.0fs/%.3g", i == i0 ? "" : " -> ",
                  *c.epochs[0].settling_time, c.max_abs_v);
      if (i > i0) {
        const auto& p = cell(static_cast<std::size_t>(i - 1),
                             static_cast<std::size_t>(j - 1));
        ok = ok && *c.epochs[0].settling_time <= *p.epochs[0].settling_time &&
             c.max_abs_v >= p.max_abs_v;
      }
    }
    diag += "]";
  }
  return {ok, fmt("grid {0.02,0.05,0.2}^2, max duty %.2f%% (<5%%); "
                  "diagonals settling/max|v|:",
                  worst_duty) +
                  diag};
}

Outcome ac7() {
  const Gains gains{};
  oracle::StateSampler sampler(707);
  double worst_fd = 0.0;
  for (int i = 0; i < 500; ++i) {
    const ReferencePoint ref = sampler.reference();
    const ErrorState eta = to_error(sampler.state(), ref);
    const double rate = eval_f(eta.eta1, ref, kDp) + eval_g(kDp) * eta.eta2;
    const double h = 1e-6 * std::max(ref.z1r / ref.z0, 1e-3);
    const double fd = (phi(eta.eta1 + h, gains, ref, kDp) -
                       phi(eta.eta1 - h, gains, ref, kDp)) /
                      (2.0 * h) * rate;
    worst_fd = std::max(
        worst_fd, oracle::rel_err(phi_derivative(eta, gains, ref, kDp), fd));
  }

  // Closed-loop transient from the 50 % equilibrium to 60 %.
  Scenario s;
  s.initial_state = {0.30, oracle::kH3ref50};
  s.setpoints = {{0.0, 0.6}};
  s.sim.t_end = 300.0;
  std::vector<RunResult> runs;
  for (double dt : {0.2, 0.1, 0.05}) {
    s.sim.dt = dt;
    runs.push_back(run(s));
  }
  const auto max_diff = [](const RunResult& a, const RunResult& b) {
    double d = 0.0;
    for (std::size_t k = 0; k < a.rows.size(); ++k) {
      d = std::max({d, std::abs(a.rows[k].h1 - b.rows[k].h1),
                    std::abs(a.rows[k].h3 - b.rows[k].h3)});
    }
    return d;
  };
  const double order =
      std::log2(max_diff(runs[0], runs[1]) / max_diff(runs[1], runs[2]));

  const Scenario nominal = load("nominal_80_50.ini");
  const RunResult a = run(nominal);
  const RunResult b = run(nominal);
  bool identical = a.rows.size() == b.rows.size();
  for (std::size_t k = 0; identical && k < a.rows.size(); ++k) {
    const auto& x = a.rows[k];
    const auto& y = b.rows[k];
    const double xs[] = {x.h1, x.h3, x.Qi, x.v, x.V, x.Vdot_analytic,
                         x.Vdot_numeric};
    const double ys[] = {y.h1, y.h3, y.Qi, y.v, y.V, y.Vdot_analytic,
                         y.Vdot_numeric};
    identical = std::memcmp(xs, ys, sizeof xs) == 0 &&
                x.saturated == y.saturated && x.guard_count == y.guard_count;
  }
  return {worst_fd < 1e-5 && order >= 3.5 && identical,
          fmt("phi_dot vs FD max rel %.2e (tol 1e-5); RK4 self-convergence "
              "order %.2f (>= 3.5); repeated runs %s",
              worst_fd, order, identical ? "bit-identical" : "DIFFER")};
}

Outcome ac8() {
  Scenario s = load("nominal_80_50.ini");
  const RunResult coarse = run(s);
  s.sim.ts *= 0.5;
  const RunResult fine = run(s);
  double worst = 0.0;
  for (int epoch = 0; epoch < 2; ++epoch) {
    worst = std::max(worst, std::abs(settled_h1(coarse, epoch) -
                                     settled_h1(fine, epoch)));
  }
  return {worst < 1e-4,
          fmt("Ts 1 s -> 0.5 s: settled h1 changes by %.2e m (tol 1e-4)",
              worst)};
}

}  // namespace

int main() {
  struct Criterion {
    const char* id;
    const char* title;
    double budget_s;  // 0: no runtime bound
    std::function<Outcome()> check;
  };
  const std::vector<Criterion> criteria = {
      {"AC1", "equilibrium correctness", 1.0, ac1},
      {"AC2", "error-dynamics equivalence", 1.0, ac2},
      {"AC3", "Lyapunov identity and decrease", 5.0, ac3},
      {"AC4", "setpoint tracking 80% -> 50%", 10.0, ac4},
      {"AC5", "fault rejection (c2 x 1.25)", 10.0, ac5},
      {"AC6", "gain trade-off sweep", 0.0, ac6},
      {"AC7", "numerical hygiene", 0.0, ac7},
      {"AC8", "sampled-data adequacy", 0.0, ac8},
  };

  int failed = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.check();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double elapsed = std::chrono::duration<double>(
                               std::chrono::steady_clock::now() - start)
                               .count();
    std::string timing = fmt("%.3f s", elapsed);
    if (c.budget_s > 0.0) {
      timing += fmt(" of %.0f s", c.budget_s);
      o.passed = o.passed && elapsed < c.budget_s;
    }
    if (!o.passed) ++failed;
    std::printf("%s %s: %s -- %s [%s]\n", o.passed ? "PASS" : "FAIL", c.id,
                c.title, o.detail.c_str(), timing.c_str());
  }
  std::printf("%d/%zu acceptance criteria passed\n",
              static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}

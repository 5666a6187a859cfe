#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tanks/simulation_engine.hpp"

// Scenario files are INI-like text:
//
//   [plant]      A, c1, c2, Q0, h0          (optional, lab rig defaults)
//   [gains]      k_phi, k_y
//   [sim]        dt, ts, t_end, integrator  (rk4 | euler)
//   [coords]     z0
//   [initial]    h1, h3                     (default: empty tanks)
//   [setpoints]  one "t, fraction" per line, fraction of h0
//   [faults]     one "t, kind, magnitude" per line
//
// '#' starts a comment. Unknown sections or keys and duplicate keys are
// errors.

namespace tanks {

Scenario parse_scenario(const std::filesystem::path& path);
Scenario parse_scenario_text(std::string_view text,
                             std::string_view source = "<scenario>");

/// Canonical text form; parse_scenario_text(format_scenario(s)) == s.
std::string format_scenario(const Scenario& scenario);

/// Shortest round-trip decimal form ("%.17g").
std::string format_double(double value);

void emit_csv(std::span<const TrajectoryRow> rows, std::ostream& out);
void emit_csv(std::span<const TrajectoryRow> rows,
              const std::filesystem::path& path);

/// Reads a CSV written by emit_csv. Epoch indices are rebuilt from changes
/// of h1ref; Vdot_numeric is not stored and reads back as 0.
std::vector<TrajectoryRow> parse_csv(std::istream& in);

/// "key: value" lines.
void emit_summary(const RunSummary& summary,
                  const CertificationReport& certification,
                  std::ostream& out);

/// One line per gain pair and epoch.
void emit_sweep_table(std::span<const GainSweepRow> table, std::ostream& out);

}  // namespace tanks

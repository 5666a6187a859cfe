#include "tanks/scenario_io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>

#include "tanks/errors.hpp"

namespace tanks {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    parts.push_back(trim(s.substr(start, pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return parts;
}

std::optional<double> to_number(std::string_view text) {
  double value = 0.0;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  if (first != last && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc{} || ptr != last || text.empty()) return std::nullopt;
  return value;
}

class ScenarioParser {
 public:
  explicit ScenarioParser(std::string_view source) : source_(source) {}

  Scenario parse(std::string_view text) {
    int line_no = 0;
    std::size_t start = 0;
    while (start <= text.size()) {
      const auto end = text.find('\n', start);
      std::string_view line = text.substr(start, end - start);
      ++line_no;
      line_ = line_no;
      if (const auto hash = line.find('#'); hash != std::string_view::npos) {
        line = line.substr(0, hash);
      }
      line = trim(line);
      if (!line.empty()) handle(line);
      if (end == std::string_view::npos) break;
      start = end + 1;
    }
    line_ = 0;
    scenario_.validate();
    return scenario_;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    std::ostringstream msg;
    msg << source_;
    if (line_ > 0) msg << ':' << line_;
    msg << ": " << what;
    throw ParseError(msg.str(), line_);
  }

  double number(std::string_view text, std::string_view what) const {
    const auto value = to_number(text);
    if (!value) {
      fail("expected a number for " + std::string(what) + ", got '" +
           std::string(text) + "'");
    }
    return *value;
  }

  void handle(std::string_view line) {
    if (line.front() == '[') {
      if (line.back() != ']') fail("malformed section header");
      const std::string name(trim(line.substr(1, line.size() - 2)));
      static const std::set<std::string> known = {
          "plant", "gains", "sim", "coords", "initial", "setpoints", "faults"};
      if (!known.contains(name)) fail("unknown section [" + name + "]");
      if (!sections_.insert(name).second) {
        fail("duplicate section [" + name + "]");
      }
      section_ = name;
      return;
    }
    if (section_.empty()) fail("entry outside of any section");
    if (section_ == "setpoints") return setpoint(line);
    if (section_ == "faults") return fault(line);
    key_value(line);
  }

  void setpoint(std::string_view line) {
    const auto parts = split(line, ',');
    if (parts.size() != 2) fail("setpoint must be 't, fraction'");
    scenario_.setpoints.push_back(
        {number(parts[0], "setpoint time"), number(parts[1], "fraction")});
  }

  void fault(std::string_view line) {
    const auto parts = split(line, ',');
    if (parts.size() != 3) fail("fault must be 't, kind, magnitude'");
    const auto kind = fault_kind_from_string(parts[1]);
    if (!kind) {
      fail("unknown fault kind '" + std::string(parts[1]) +
           "' (scale_c1, scale_c2, inflow_bias, leak_tank1)");
    }
    scenario_.faults.push_back({number(parts[0], "fault time"), *kind,
                                number(parts[2], "fault magnitude")});
  }

  void key_value(std::string_view line) {
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) fail("expected 'key = value'");
    const std::string key(trim(line.substr(0, eq)));
    const std::string_view value = trim(line.substr(eq + 1));
    if (!keys_.insert(section_ + "." + key).second) {
      fail("duplicate key '" + key + "' in [" + section_ + "]");
    }

    Scenario& s = scenario_;
    if (section_ == "sim" && key == "integrator") {
      const auto method = integrator_from_string(value);
      if (!method) fail("integrator must be rk4 or euler");
      s.sim.integrator = *method;
      return;
    }

    const std::map<std::string, double*> fields = [&] {
      if (section_ == "plant") {
        return std::map<std::string, double*>{{"A", &s.plant.A},
                                              {"c1", &s.plant.c1},
                                              {"c2", &s.plant.c2},
                                              {"Q0", &s.plant.Q0},
                                              {"h0", &s.plant.h0}};
      }
      if (section_ == "gains") {
        return std::map<std::string, double*>{{"k_phi", &s.gains.k_phi},
                                              {"k_y", &s.gains.k_y}};
      }
      if (section_ == "sim") {
        return std::map<std::string, double*>{
            {"dt", &s.sim.dt}, {"ts", &s.sim.ts}, {"t_end", &s.sim.t_end}};
      }
      if (section_ == "coords") {
        return std::map<std::string, double*>{{"z0", &s.z0}};
      }
      return std::map<std::string, double*>{{"h1", &s.initial_state.h1},
                                            {"h3", &s.initial_state.h3}};
    }();
    const auto it = fields.find(key);
    if (it == fields.end()) {
      fail("unknown key '" + key + "' in [" + section_ + "]");
    }
    *it->second = number(value, key);
  }

  std::string source_;
  Scenario scenario_;
  std::string section_;
  std::set<std::string> sections_;
  std::set<std::string> keys_;
  int line_ = 0;
};

}  // namespace

std::string format_double(double value) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

Scenario parse_scenario_text(std::string_view text, std::string_view source) {
  return ScenarioParser(source).parse(text);
}

Scenario parse_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open scenario " + path.string(), 0);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scenario_text(buf.str(), path.string());
}

std::string format_scenario(const Scenario& s) {
  std::ostringstream out;
  const auto kv = [&](const char* key, double value) {
    out << key << " = " << format_double(value) << '\n';
  };
  out << "[plant]\n";
  kv("A", s.plant.A);
  kv("c1", s.plant.c1);
  kv("c2", s.plant.c2);
  kv("Q0", s.plant.Q0);
  kv("h0", s.plant.h0);
  out << "\n[gains]\n";
  kv("k_phi", s.gains.k_phi);
  kv("k_y", s.gains.k_y);
  out << "\n[sim]\n";
  kv("dt", s.sim.dt);
  kv("ts", s.sim.ts);
  kv("t_end", s.sim.t_end);
  out << "integrator = " << to_string(s.sim.integrator) << '\n';
  out << "\n[coords]\n";
  kv("z0", s.z0);
  out << "\n[initial]\n";
  kv("h1", s.initial_state.h1);
  kv("h3", s.initial_state.h3);
  out << "\n[setpoints]\n";
  for (const auto& sp : s.setpoints) {
    out << format_double(sp.t) << ", " << format_double(sp.fraction) << '\n';
  }
  out << "\n[faults]\n";
  for (const auto& f : s.faults) {
    out << format_double(f.t_start) << ", " << to_string(f.kind) << ", "
        << format_double(f.magnitude) << '\n';
  }
  return out.str();
}

void emit_csv(std::span<const TrajectoryRow> rows, std::ostream& out) {
  for (std::size_t i = 0; i < kTrajectoryColumns.size(); ++i) {
    out << (i ? "," : "") << kTrajectoryColumns[i];
  }
  out << '\n';
  for (const auto& r : rows) {
    const double values[] = {r.t,      r.h1,  r.h3,   r.h1ref, r.Qi,
                             r.Qi_raw, r.u_s, r.v,    r.eta1,  r.eta2,
                             r.y,      r.V,   r.Vdot_analytic};
    for (double v : values) out << format_double(v) << ',';
    out << (r.saturated ? 1 : 0) << ',' << r.guard_count << '\n';
  }
}

void emit_csv(std::span<const TrajectoryRow> rows,
              const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  emit_csv(rows, out);
  out.flush();
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

std::vector<TrajectoryRow> parse_csv(std::istream& in) {
  std::string line;
  int line_no = 1;
  if (!std::getline(in, line)) throw ParseError("empty CSV", 0);
  const auto header = split(line, ',');
  if (header.size() != kTrajectoryColumns.size()) {
    throw ParseError("CSV header has wrong column count", 1);
  }
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] != kTrajectoryColumns[i]) {
      throw ParseError("unexpected CSV column '" + std::string(header[i]) + "'",
                       1);
    }
  }

  std::vector<TrajectoryRow> rows;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto cells = split(line, ',');
    if (cells.size() != kTrajectoryColumns.size()) {
      throw ParseError("CSV row has wrong column count", line_no);
    }
    double v[15];
    for (std::size_t i = 0; i < cells.size(); ++i) {
      const auto value = to_number(cells[i]);
      if (!value) throw ParseError("non-numeric CSV cell", line_no);
      v[i] = *value;
    }
    TrajectoryRow r;
    r.t = v[0];
    r.h1 = v[1];
    r.h3 = v[2];
    r.h1ref = v[3];
    r.Qi = v[4];
    r.Qi_raw = v[5];
    r.u_s = v[6];
    r.v = v[7];
    r.eta1 = v[8];
    r.eta2 = v[9];
    r.y = v[10];
    r.V = v[11];
    r.Vdot_analytic = v[12];
    r.saturated = v[13] != 0.0;
    r.guard_count = static_cast<int>(v[14]);
    if (!rows.empty()) {
      r.epoch = rows.back().epoch + (r.h1ref != rows.back().h1ref ? 1 : 0);
    }
    rows.push_back(r);
  }
  return rows;
}

namespace {

std::string short_number(double value) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", value);
  return buf;
}

}  // namespace

void emit_summary(const RunSummary& summary,
                  const CertificationReport& certification,
                  std::ostream& out) {
  out << "epochs: " << summary.epochs.size() << '\n';
  out << "max_abs_v: " << short_number(summary.max_abs_v) << '\n';
  out << "saturation_duty_pct: " << short_number(summary.saturation_duty_pct)
      << '\n';
  out << "lyapunov_violations: " << summary.lyapunov_violations << '\n';
  out << "lyapunov_checked: " << certification.checked << '\n';
  out << "lyapunov_monotonicity_violations: "
      << certification.monotonicity_violations.size() << '\n';
  out << "guard_activations: " << summary.guard_activations << '\n';
  out << "certified: " << (certification.certified() ? "yes" : "no") << '\n';
  for (std::size_t i = 0; i < summary.epochs.size(); ++i) {
    const auto& e = summary.epochs[i];
    const std::string p = "epoch." + std::to_string(i) + ".";
    out << p << "t_start: " << short_number(e.t_start) << '\n';
    out << p << "h1ref: " << short_number(e.h1ref) << '\n';
    out << p << "settling_time: "
        << (e.settling_time ? short_number(*e.settling_time) : "unsettled")
        << '\n';
    out << p << "overshoot_pct: " << short_number(e.overshoot_pct) << '\n';
    out << p << "steady_state_error: " << short_number(e.steady_state_error)
        << '\n';
    out << p << "max_abs_v: " << short_number(e.max_abs_v) << '\n';
    out << p << "saturation_duty_pct: " << short_number(e.saturation_duty_pct)
        << '\n';
  }
}

void emit_sweep_table(std::span<const GainSweepRow> table, std::ostream& out) {
  out << "k_phi,k_y,epoch,h1ref,settling_time,overshoot_pct,"
         "steady_state_error,max_abs_v,saturation_duty_pct,"
         "lyapunov_violations\n";
  for (const auto& row : table) {
    for (std::size_t i = 0; i < row.summary.epochs.size(); ++i) {
      const auto& e = row.summary.epochs[i];
      out << short_number(row.gains.k_phi) << ','
          << short_number(row.gains.k_y) << ',' << i << ','
          << short_number(e.h1ref) << ','
          << (e.settling_time ? short_number(*e.settling_time) : "unsettled")
          << ',' << short_number(e.overshoot_pct) << ','
          << short_number(e.steady_state_error) << ','
          << short_number(e.max_abs_v) << ','
          << short_number(e.saturation_duty_pct) << ','
          << row.summary.lyapunov_violations << '\n';
    }
  }
}

}  // namespace tanks

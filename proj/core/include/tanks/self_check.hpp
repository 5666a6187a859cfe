#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "tanks/plant_model.hpp"

namespace tanks {

struct CheckResult {
  std::string name;
  bool passed = false;
  double worst = 0.0;      // worst observed error measure
  double tolerance = 0.0;  // pass threshold on `worst`
  std::size_t samples = 0;
};

/// Randomized numerical property checks of the model, transform, law and
/// Lyapunov identity, as run by `tankctl verify`. Deterministic for a seed.
std::vector<CheckResult> run_self_checks(const PlantParams& plant = {},
                                         std::uint64_t seed = 20240611);

/// Prints one line per check; returns true when all passed.
bool report_self_checks(const std::vector<CheckResult>& results,
                        std::ostream& out);

}  // namespace tanks

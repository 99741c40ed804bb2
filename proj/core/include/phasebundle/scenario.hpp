#pragma once

#include "phasebundle/serialization.hpp"

namespace phasebundle {

// Numeric defaults shared by every task; printed by `phasebundle --show-defaults`.
json default_settings();

struct ScenarioOutcome {
  std::string artifact;  // JSON or CSV text
  std::string format;    // "json" | "csv"
  std::string path;      // empty: caller prints to stdout
};

// Runs one scenario configuration.  Throws StructuralError / DomainError /
// CompatibilityError for invalid configs and NumericalError /
// AdiabaticityError for numerical failures; the CLI maps these to exit codes
// 2 and 3 respectively.
ScenarioOutcome run_scenario(const json& config);

}  // namespace phasebundle

#pragma once

#include <string>
#include <vector>

#include "selfdual/torus.hpp"

namespace selfdual {

struct CheckResult {
  std::string name;
  bool pass = false;
  std::string detail;
};

struct SuiteResult {
  std::string suite;
  std::vector<CheckResult> checks;
  bool all_pass() const {
    for (const auto& c : checks)
      if (!c.pass) return false;
    return true;
  }
};

std::vector<std::string> suite_names();

/// Runs one of the property-test batteries: duality, boundary, fields,
/// gradients, refinement. Throws std::invalid_argument for unknown names.
SuiteResult run_suite(const std::string& name);

/// The two halves of the duality suite, separately callable so the
/// acceptance runner can time them against their own budgets.
SuiteResult asd_battery_checks();
SuiteResult lemma_regularization_checks();

/// Direct spectral convolution of (u.grad)u over the retained band, without
/// any FFT; the independent oracle for the pseudo-spectral advection.
SpectralField advection_by_convolution(const SpectralField& u);

}  // namespace selfdual

// SPDX-License-Identifier: Apache-2.0
//
// Parameter sweeps and the self-validation report.  A sweep walks one axis
// (mean SNR in dB, branch count, or misalignment severity), evaluates the
// requested metric under one or more computation modes, and emits a stable
// CSV: '#' comment lines with the resolved configuration, a header row,
// then one row per grid point per mode.  Identical inputs produce byte
// identical output; per-point failures are recorded in their row and the
// run continues.
#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "thz/config.hpp"

namespace thz {

struct SweepSpec {
  std::string metric = "outage";   // outage | ber | capacity
  std::string receiver = "mrc";    // single | mrc
  std::string axis = "gamma0_db";  // gamma0_db | l | phi
  std::vector<double> values;      // nonempty, strictly monotone
  std::vector<std::string> modes;  // subset of exact | asymptotic | mc
};

// Build a sweep from sweep.* keys, applying the documented defaults and
// validating the grid; throws cfg::ConfigError on bad input.
SweepSpec sweep_from(const cfg::Config& c);

// Evaluate the sweep and write the CSV to os.
void run_sweep(const cfg::Config& c, const SweepSpec& spec, std::ostream& os);

// Cross-check battery: analytic paths against each other, against the
// sampling oracle, and the reduction/consistency invariants; one line per
// check with numbers.  Returns the number of failed checks.
int validate(const cfg::Config& c, std::ostream& os);

}  // namespace thz

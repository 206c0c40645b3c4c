// SPDX-License-Identifier: Apache-2.0
//
// milac-chanest: MIMO channel estimation with microwave linear analog
// computers (MiLACs).
//
// Self-check suite: round-trips, KKT certificates, pathwise equivalences and
// closed-form NMSE checks at small sizes, with optional fault injection to
// confirm the checks are sensitive.

#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "milac/sim/experiment.hpp"

namespace milac::sim {

enum class FaultInjection { none, admittance, kkt };

FaultInjection parse_fault(const std::string& text);

struct CheckResult {
  std::string name;
  bool pass = false;
  double observed = 0.0;
  double limit = 0.0;
  std::string note;
};

struct VerifyReport {
  std::vector<CheckResult> checks;
  bool all_pass() const {
    for (const auto& c : checks)
      if (!c.pass) return false;
    return !checks.empty();
  }
};

VerifyReport run_verify(const ExperimentConfig& config,
                        FaultInjection fault = FaultInjection::none);

void print_verify_report(const VerifyReport& report, std::ostream& out);

}  // namespace milac::sim

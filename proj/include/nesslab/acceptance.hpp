// Copyright 2026 The nesslab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <functional>
#include <string>
#include <vector>

namespace nesslab {

struct CheckResult {
  std::string id;
  std::string title;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
  bool informational = false;  ///< reported but excluded from the verdict
};

struct CheckInfo {
  std::string id;
  std::string title;
};

/// Criterion ids in execution order.
std::vector<CheckInfo> acceptance_checks();

struct AcceptanceOptions {
  std::vector<std::string> only;  ///< empty runs every criterion
};

/// Runs the acceptance battery. The callback sees each result as soon as it is known.
/// Throws std::invalid_argument for an unknown id in `only`.
std::vector<CheckResult> run_acceptance(const AcceptanceOptions& options = {},
                                        const std::function<void(const CheckResult&)>& on_result = {});

/// True when every non-informational result passed.
bool acceptance_passed(const std::vector<CheckResult>& results);

}  // namespace nesslab

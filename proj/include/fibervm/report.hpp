#pragma once

#include <string>

#include "fibervm/machine.hpp"

namespace fibervm {

struct ReportOptions {
  bool backtrace_on_error = true;
  bool metrics = false;
  bool metrics_json = false;
};

/// What `fibervm run` prints: trace lines, the headline, the output log,
/// the fatal error with its backtrace, leaks, then metrics.
std::string format_report(const RunResult& r, const ReportOptions& opts = {});

std::string format_metrics(const runtime::Metrics& m, bool json);

}  // namespace fibervm

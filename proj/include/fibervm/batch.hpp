#pragma once

#include <vector>

#include "fibervm/machine.hpp"

namespace fibervm {

struct BatchJob {
  ExprPtr entry;
  RunOptions options;
};

/// Reference implementation: one machine after another.
std::vector<RunResult> run_batch_serial(const std::vector<BatchJob>& jobs);
/// Independent machines spread over OpenMP threads; same results, same order.
std::vector<RunResult> run_batch_parallel(const std::vector<BatchJob>& jobs);

}  // namespace fibervm

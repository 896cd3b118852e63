#include "fibervm/batch.hpp"

#include <exception>

namespace fibervm {

std::vector<RunResult> run_batch_serial(const std::vector<BatchJob>& jobs) {
  std::vector<RunResult> out;
  out.reserve(jobs.size());
  for (const auto& j : jobs) out.push_back(run(j.entry, j.options));
  return out;
}

std::vector<RunResult> run_batch_parallel(const std::vector<BatchJob>& jobs) {
  std::vector<RunResult> out(jobs.size());
  std::vector<std::exception_ptr> errors(jobs.size());
  const auto n = static_cast<long>(jobs.size());
#pragma omp parallel for schedule(dynamic)
  for (long i = 0; i < n; ++i) {
    try {
      out[i] = run(jobs[i].entry, jobs[i].options);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

}  // namespace fibervm

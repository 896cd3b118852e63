#include "fibervm/report.hpp"

#include <json.hpp>
#include <sstream>

namespace fibervm {

std::string format_metrics(const runtime::Metrics& m, bool json) {
  const auto flat = m.flatten();
  if (json) {
    nlohmann::ordered_json j = nlohmann::ordered_json::object();
    for (const auto& [k, v] : flat) j[k] = v;
    return j.dump() + '\n';
  }
  std::string out;
  for (const auto& [k, v] : flat) out += k + '=' + std::to_string(v) + '\n';
  return out;
}

std::string format_report(const RunResult& r, const ReportOptions& opts) {
  std::ostringstream os;
  for (const auto& ev : r.trace) os << format_trace_line(ev) << '\n';
  os << r.headline() << '\n';
  for (const auto& line : r.output) os << line << '\n';
  if (r.status == RunResult::Status::Fatal) {
    os << "error: " << r.fatal->message << '\n';
    if (opts.backtrace_on_error) os << format_backtrace(r.fatal->backtrace);
  }
  for (const auto& leak : r.leaks) {
    os << "leak: continuation #" << leak.id << " never resumed\n";
    os << format_backtrace(leak.creation);
  }
  if (opts.metrics || opts.metrics_json) os << format_metrics(r.metrics, opts.metrics_json);
  return os.str();
}

}  // namespace fibervm

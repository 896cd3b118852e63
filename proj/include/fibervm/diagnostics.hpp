#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "fibervm/rules.hpp"
#include "fibervm/runtime.hpp"
#include "fibervm/values.hpp"

namespace fibervm {

enum class Boundary : std::uint8_t { None, ExtCall, Callback, HandlerPush };

/// One line of a cross-fiber backtrace, innermost first.
struct BacktraceEntry {
  SegmentKind segment;
  FiberId fiber = kNoFiber;  // OCaml entries only
  std::string summary;
  Boundary boundary = Boundary::None;

  friend bool operator==(const BacktraceEntry&, const BacktraceEntry&) = default;
};

using Backtrace = std::vector<BacktraceEntry>;

/// Where the machine was executing: an OCaml fiber or a C segment.
struct Context {
  SegmentKind kind = SegmentKind::C;
  std::uint64_t id = 0;  // fiber id or C segment id
  friend bool operator==(const Context&, const Context&) = default;
};

struct TraceEvent {
  std::uint64_t step = 0;
  Rule rule = Rule::Var;  // admin rule name when the step was administrative
  Context context;        // before the step
  /// Fiber the rule acted on: the new fiber for Handle/Callback, the finished
  /// one for RetFib/RetToC/ExnHn, the handling one for EffHn.
  FiberId subject = kNoFiber;
  std::uint32_t segments = 0;  // stack depth after the step
  std::uint32_t fibers = 0;
};

/// Full walk of the alternating stack: each segment's frames innermost-first,
/// with a HandlerPush marker after every handler fiber, a Callback marker
/// after the bottom fiber of each OCaml segment and an ExtCall marker after
/// every C segment except the entry segment.
Backtrace backtrace(const Configuration& config);
/// Walk of a captured continuation's fibers.
Backtrace continuation_backtrace(const Continuation& k);

class UsedContinuation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};
/// Throws UsedContinuation when the registry reports the identity consumed.
Backtrace continuation_backtrace(const Kont& k, const runtime::FiberRuntime& rt);

/// Frames plus boundary markers, counted recursively; equals backtrace size.
std::size_t count_backtrace_entries(const Stack& s);

/// "#<n> <segment> <summary>"
std::string format_backtrace(const Backtrace& bt);
/// "<step>\t<RULE>\t<fiber-id-or-C>"
std::string format_trace_line(const TraceEvent& e);

class PhaseShapeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Step counts of the handle / perform / handle-effect / resume / return
/// sequence, for the first occurrence at or after `from`. Counts are machine
/// steps. `next` receives the index just past the sequence.
runtime::PhaseCounts phase_counters(const std::vector<TraceEvent>& trace, std::size_t from = 0,
                                    std::size_t* next = nullptr);
/// Every complete occurrence, in order.
std::vector<runtime::PhaseCounts> phase_counters_all(const std::vector<TraceEvent>& trace);

}  // namespace fibervm

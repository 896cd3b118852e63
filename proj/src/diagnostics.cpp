#include "fibervm/diagnostics.hpp"

#include <sstream>

namespace fibervm {

namespace {

void fiber_entries(const Fiber& f, Backtrace& out) {
  for (const Frame& fr : f.frames) out.push_back({SegmentKind::OCaml, f.id, show(fr), Boundary::None});
}

BacktraceEntry marker(SegmentKind seg, FiberId id, Boundary b) {
  switch (b) {
    case Boundary::HandlerPush: return {seg, id, "-- handler --", b};
    case Boundary::Callback: return {seg, id, "-- callback --", b};
    case Boundary::ExtCall: return {seg, id, "-- external call --", b};
    case Boundary::None: break;
  }
  return {seg, id, "", b};
}

}  // namespace

Backtrace backtrace(const Configuration& config) {
  Backtrace out;
  for (auto it = config.stack.begin(); it != config.stack.end(); ++it) {
    const Segment& s = *it;
    if (s.kind == SegmentKind::C) {
      for (const Frame& fr : s.frames) out.push_back({SegmentKind::C, kNoFiber, show(fr), Boundary::None});
      auto next = it;
      if (++next != config.stack.end()) out.push_back(marker(SegmentKind::C, kNoFiber, Boundary::ExtCall));
      continue;
    }
    std::size_t i = 0;
    for (const Fiber& f : s.k) {
      fiber_entries(f, out);
      const bool last = ++i == s.k.size();
      out.push_back(marker(SegmentKind::OCaml, f.id, last ? Boundary::Callback : Boundary::HandlerPush));
    }
  }
  return out;
}

Backtrace continuation_backtrace(const Continuation& k) {
  Backtrace out;
  for (const Fiber& f : k) {
    fiber_entries(f, out);
    out.push_back(marker(SegmentKind::OCaml, f.id, Boundary::HandlerPush));
  }
  return out;
}

Backtrace continuation_backtrace(const Kont& k, const runtime::FiberRuntime& rt) {
  if (rt.config().mode == runtime::Mode::OneShot && rt.registry().state(k.id) == runtime::ContState::Used)
    throw UsedContinuation("continuation #" + std::to_string(k.id) + " already resumed");
  return continuation_backtrace(k.k);
}

std::size_t count_backtrace_entries(const Stack& s) {
  if (s.empty()) return 0;
  const Segment& top = s.head();
  std::size_t n = 0;
  if (top.kind == SegmentKind::C) {
    n = top.frames.size() + (s.tail().empty() ? 0 : 1);
  } else {
    for (const Fiber& f : top.k) n += f.frames.size() + 1;
  }
  return n + count_backtrace_entries(s.tail());
}

std::string format_backtrace(const Backtrace& bt) {
  std::ostringstream os;
  for (std::size_t i = 0; i < bt.size(); ++i) {
    const auto& e = bt[i];
    os << '#' << i << ' ' << (e.segment == SegmentKind::C ? std::string("C") : "fiber" + std::to_string(e.fiber)) << ' '
       << e.summary << '\n';
  }
  return os.str();
}

std::string format_trace_line(const TraceEvent& e) {
  std::string where = e.context.kind == SegmentKind::C ? "C" : std::to_string(e.context.id);
  return std::to_string(e.step) + '\t' + std::string(rule_name(e.rule)) + '\t' + where;
}

runtime::PhaseCounts phase_counters(const std::vector<TraceEvent>& trace, std::size_t from, std::size_t* next) {
  const std::size_t n = trace.size();
  auto find = [&](std::size_t start, auto pred) -> std::size_t {
    for (std::size_t i = start; i < n; ++i)
      if (pred(trace[i])) return i;
    throw PhaseShapeError("trace has no complete handle/perform/resume/return sequence");
  };
  const std::size_t ic = find(from, [](const TraceEvent& e) { return e.rule == Rule::EffHn; });
  const FiberId handler = trace[ic].subject;
  std::size_t ia = n;
  for (std::size_t i = ic; i-- > from;)
    if (trace[i].rule == Rule::Handle && trace[i].subject == handler) {
      ia = i;
      break;
    }
  if (ia == n) throw PhaseShapeError("handled fiber was not created inside the trace window");
  const std::size_t ib = find(ia + 1, [](const TraceEvent& e) { return e.rule == Rule::Perform; });
  if (ib > ic) throw PhaseShapeError("no perform between handle and handler");
  const std::size_t ir = find(ic + 1, [](const TraceEvent& e) { return e.rule == Rule::Resume; });
  const std::size_t id = find(ir + 1, [](const TraceEvent& e) { return e.rule == Rule::RetFib; });
  const std::size_t ie =
      find(id, [&](const TraceEvent& e) { return e.rule == Rule::RetFib && e.subject == handler; });
  auto gap = [&](std::size_t a, std::size_t b) {
    return static_cast<std::int64_t>(trace[b].step) - static_cast<std::int64_t>(trace[a].step);
  };
  if (next) *next = ie + 1;
  return runtime::PhaseCounts{gap(ia, ib), gap(ib, ic), gap(ic, id), gap(id, ie)};
}

std::vector<runtime::PhaseCounts> phase_counters_all(const std::vector<TraceEvent>& trace) {
  std::vector<runtime::PhaseCounts> out;
  std::size_t from = 0;
  for (;;) {
    try {
      std::size_t next = 0;
      out.push_back(phase_counters(trace, from, &next));
      from = next;
    } catch (const PhaseShapeError&) {
      return out;
    }
  }
}

}  // namespace fibervm

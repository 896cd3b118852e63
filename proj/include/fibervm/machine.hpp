#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <variant>
#include <vector>

#include "fibervm/builtins.hpp"
#include "fibervm/diagnostics.hpp"
#include "fibervm/parser.hpp"
#include "fibervm/rules.hpp"
#include "fibervm/runtime.hpp"
#include "fibervm/values.hpp"

namespace fibervm {

struct RunOptions {
  runtime::RuntimeConfig runtime;
  /// Exception-only handlers push a trap frame instead of a fiber.
  bool opt_exn = true;
  bool trace = false;
  std::uint64_t max_steps = 10'000'000;
  /// Assert stack alternation and fiber liveness after every step.
  bool check_invariants = false;
  std::int64_t io_batch = 1;
};

enum class FatalKind : std::uint8_t { UncaughtException, StuckInC, StuckOther };

std::string to_string(FatalKind k);

struct Fatal {
  FatalKind kind = FatalKind::StuckOther;
  std::optional<Label> label;  // uncaught exceptions
  std::string message;
  Backtrace backtrace;
};

struct StepOutcome {
  enum class Kind : std::uint8_t { Next, Done, Fatal };
  Kind kind = Kind::Next;
  Rule rule = Rule::Var;
  std::optional<Rule> admin;  // set for AdminC / AdminO steps
  std::optional<Value> value;
  std::optional<Fatal> fatal;

  /// The most specific rule name: the administrative rule when there is one.
  [[nodiscard]] Rule shown_rule() const { return admin.value_or(rule); }
};

struct AdminStep {
  Term term;
  Env env;
  FrameList frames;
  Rule rule;
};
struct AdminError {
  std::string message;
};
struct NoAdminRule {};
using AdminOutcome = std::variant<NoAdminRule, AdminStep, AdminError>;

/// Administrative reductions, common to C and OCaml segments.
AdminOutcome admin_step(const Term& term, const Env& env, const FrameList& frames);

/// <e, {}, ([], .)>
Configuration initial_config(ExprPtr e);

struct Leak {
  ContId id;
  Backtrace creation;
};

struct RunResult {
  enum class Status : std::uint8_t { Done, Fatal, StepBudgetExceeded };
  Status status = Status::Done;
  std::optional<Value> value;
  std::optional<Fatal> fatal;
  runtime::Metrics metrics;
  std::vector<TraceEvent> trace;
  std::vector<std::string> output;
  std::vector<Leak> leaks;
  std::size_t live_fibers_at_exit = 0;

  /// "=> v", "fatal: Kind(label)" or "step budget exceeded".
  [[nodiscard]] std::string headline() const;
  /// Result and output log; what must agree across runtime modes.
  [[nodiscard]] bool observably_equal(const RunResult& other) const;
};

/// Small-step machine over one configuration.
class Machine {
 public:
  explicit Machine(ExprPtr entry, RunOptions opts = {});
  Machine(Configuration config, RunOptions opts);

  StepOutcome step();
  RunResult run();

  [[nodiscard]] const Configuration& config() const { return cfg_; }
  void set_config(Configuration c) { cfg_ = std::move(c); }
  [[nodiscard]] Store& store() { return store_; }
  [[nodiscard]] runtime::FiberRuntime& fibers() { return rt_; }
  [[nodiscard]] const runtime::FiberRuntime& fibers() const { return rt_; }
  [[nodiscard]] const std::vector<TraceEvent>& trace() const { return trace_; }
  [[nodiscard]] const RunOptions& options() const { return opts_; }
  [[nodiscard]] std::uint64_t steps() const { return rt_.metrics().steps_total; }
  /// Runtime counters plus per-rule step counts.
  [[nodiscard]] runtime::Metrics metrics() const;

  /// Fresh continuations with the backtrace of their captured fibers.
  [[nodiscard]] std::vector<Leak> leak_report() const;
  [[nodiscard]] Context context() const;
  std::uint64_t new_c_segment() { return next_c_id_++; }

  /// Throws std::logic_error when an invariant is broken.
  void check_invariants() const;

 private:
  StepOutcome c_step(const Segment& top, const Stack& below);
  StepOutcome o_step(const Segment& top, const Stack& below);
  StepOutcome stuck(FatalKind kind, std::string message) const;
  void after_step(const StepOutcome& out, const Context& before);
  void sync_top_fiber();
  void checkpoint();
  void free_fiber(FiberId id);
  FiberId alloc_fiber(FiberId parent);

  RunOptions opts_;
  Configuration cfg_;
  Store store_;
  runtime::FiberRuntime rt_;
  std::vector<TraceEvent> trace_;
  std::array<std::uint64_t, kRuleCount> rule_counts_{};
  std::unordered_map<ContId, Continuation> fresh_konts_;
  std::uint64_t next_c_id_ = 1;
  FiberId subject_ = kNoFiber;
  bool checked_point_ = false;
};

RunResult run(ExprPtr entry, const RunOptions& opts = {});
RunResult run(const SourceProgram& program, const RunOptions& opts = {});

}  // namespace fibervm

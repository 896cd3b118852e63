#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace fibervm::runtime {

enum class Mode : std::uint8_t { OneShot, MultiShot };

struct RuntimeConfig {
  std::int64_t initial_words = 16;
  std::int64_t red_zone_words = 16;
  std::int64_t frame_words = 4;
  std::size_t cache_capacity = 64;
  Mode mode = Mode::OneShot;

  /// The usable area sits below the red zone, so a fresh fiber holds
  /// initial_words of frames before its first overflow check trips.
  [[nodiscard]] std::int64_t effective_initial() const { return initial_words + red_zone_words; }
  /// Throws std::invalid_argument.
  void validate() const;
};

using FiberId = std::uint64_t;
using ContId = std::uint64_t;
inline constexpr FiberId kNoFiber = 0;

enum class FiberState : std::uint8_t { Active, Captured, Dead };

struct FiberMeta {
  FiberId id = kNoFiber;
  std::int64_t capacity_words = 0;
  std::int64_t used_words = 0;
  FiberState state = FiberState::Active;
  std::optional<FiberId> parent;
};

/// Recently freed stacks, most recently freed first, reused on exact capacity.
class StackCache {
 public:
  explicit StackCache(std::size_t capacity) : capacity_(capacity) {}

  /// False when full (the stack is discarded).
  bool put(std::int64_t capacity_words);
  bool take(std::int64_t capacity_words);

  [[nodiscard]] std::size_t size() const { return entries_.size(); }
  [[nodiscard]] std::size_t capacity() const { return capacity_; }

 private:
  std::size_t capacity_;
  std::vector<std::int64_t> entries_;  // back = most recent
};

enum class ContState : std::uint8_t { Fresh, Used };

class OneShotRegistry {
 public:
  ContId create();
  /// Fresh -> Used. False if already used.
  bool consume(ContId id);
  [[nodiscard]] std::optional<ContState> state(ContId id) const;
  [[nodiscard]] std::vector<ContId> fresh() const;
  [[nodiscard]] std::size_t size() const { return states_.size(); }

 private:
  ContId next_ = 1;
  std::map<ContId, ContState> states_;
};

struct PhaseCounts {
  std::int64_t a_b = 0;
  std::int64_t b_c = 0;
  std::int64_t c_d = 0;
  std::int64_t d_e = 0;
  friend bool operator==(const PhaseCounts&, const PhaseCounts&) = default;
};

struct Metrics {
  std::uint64_t fiber_allocs = 0;
  std::uint64_t fiber_frees = 0;
  std::uint64_t cache_hits = 0;
  std::uint64_t cache_misses = 0;
  std::uint64_t resizes = 0;
  std::uint64_t fiber_switches = 0;
  std::uint64_t steps_total = 0;
  std::uint64_t continuations_captured = 0;
  std::uint64_t continuations_resumed = 0;
  std::uint64_t fiber_copies = 0;
  std::uint64_t exn_traps = 0;
  std::map<std::string, std::uint64_t> rule_counts;
  std::map<std::int64_t, std::uint64_t> handler_search_depths;
  std::optional<PhaseCounts> phases;

  /// Flat key/value view, stable key order.
  [[nodiscard]] std::vector<std::pair<std::string, std::int64_t>> flatten() const;
};

struct ResumeResult {
  bool ok = false;
  std::vector<FiberId> fibers;  // the ids now running (copies in multishot mode)
};

/// Word-accounted simulation of heap-allocated fibers.
class FiberRuntime {
 public:
  explicit FiberRuntime(RuntimeConfig cfg = {});

  const FiberMeta& alloc_fiber(std::optional<FiberId> parent, std::optional<std::int64_t> capacity = std::nullopt);
  /// Throws std::logic_error on double free or unknown id.
  void free_fiber(FiberId id);

  /// Hard limit: grows immediately if used exceeds capacity.
  void charge_push(FiberId id, std::int64_t n_frames);
  void charge_pop(FiberId id, std::int64_t n_frames);
  /// Soft limit at checked points: keeps the red zone free above used words.
  void overflow_check(FiberId id);

  /// Captures the listed fibers as one continuation. Pseudo fibers (kNoFiber)
  /// are skipped.
  ContId capture(std::span<const FiberId> fibers);
  /// Fibers travelling with an unhandled effect go back on the stack.
  void reinstate(std::span<const FiberId> fibers);
  /// One-shot: consumes the identity and reactivates the fibers.
  /// Multi-shot: allocates copies and leaves the original untouched.
  ResumeResult resume(ContId id, std::span<const FiberId> fibers, std::optional<FiberId> new_parent);
  void set_parent(FiberId id, std::optional<FiberId> parent);

  /// Continuation identities captured but never resumed.
  [[nodiscard]] std::vector<ContId> leak_report() const;

  [[nodiscard]] const FiberMeta& meta(FiberId id) const;
  [[nodiscard]] bool exists(FiberId id) const { return fibers_.count(id) != 0; }
  [[nodiscard]] std::size_t live_fibers() const;
  [[nodiscard]] const RuntimeConfig& config() const { return cfg_; }
  [[nodiscard]] const StackCache& cache() const { return cache_; }
  [[nodiscard]] const OneShotRegistry& registry() const { return registry_; }
  [[nodiscard]] Metrics& metrics() { return metrics_; }
  [[nodiscard]] const Metrics& metrics() const { return metrics_; }

 private:
  FiberMeta& get(FiberId id);
  void grow_until(FiberMeta& m, std::int64_t needed_words);

  RuntimeConfig cfg_;
  FiberId next_id_ = 1;
  std::unordered_map<FiberId, FiberMeta> fibers_;
  StackCache cache_;
  OneShotRegistry registry_;
  Metrics metrics_;
};

}  // namespace fibervm::runtime

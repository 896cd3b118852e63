#include "fibervm/runtime.hpp"

#include <algorithm>
#include <stdexcept>

namespace fibervm::runtime {

void RuntimeConfig::validate() const {
  if (initial_words < 1) throw std::invalid_argument("initial_words must be >= 1");
  if (red_zone_words < 0) throw std::invalid_argument("red_zone_words must be >= 0");
  if (frame_words < 1) throw std::invalid_argument("frame_words must be >= 1");
}

bool StackCache::put(std::int64_t capacity_words) {
  if (entries_.size() >= capacity_) return false;
  entries_.push_back(capacity_words);
  return true;
}

bool StackCache::take(std::int64_t capacity_words) {
  for (auto it = entries_.rbegin(); it != entries_.rend(); ++it) {
    if (*it == capacity_words) {
      entries_.erase(std::next(it).base());
      return true;
    }
  }
  return false;
}

ContId OneShotRegistry::create() {
  const ContId id = next_++;
  states_.emplace(id, ContState::Fresh);
  return id;
}

bool OneShotRegistry::consume(ContId id) {
  auto it = states_.find(id);
  if (it == states_.end() || it->second == ContState::Used) return false;
  it->second = ContState::Used;
  return true;
}

std::optional<ContState> OneShotRegistry::state(ContId id) const {
  auto it = states_.find(id);
  if (it == states_.end()) return std::nullopt;
  return it->second;
}

std::vector<ContId> OneShotRegistry::fresh() const {
  std::vector<ContId> out;
  for (const auto& [id, st] : states_)
    if (st == ContState::Fresh) out.push_back(id);
  return out;
}

std::vector<std::pair<std::string, std::int64_t>> Metrics::flatten() const {
  std::vector<std::pair<std::string, std::int64_t>> out = {
      {"steps_total", static_cast<std::int64_t>(steps_total)},
      {"fiber_allocs", static_cast<std::int64_t>(fiber_allocs)},
      {"fiber_frees", static_cast<std::int64_t>(fiber_frees)},
      {"cache_hits", static_cast<std::int64_t>(cache_hits)},
      {"cache_misses", static_cast<std::int64_t>(cache_misses)},
      {"resizes", static_cast<std::int64_t>(resizes)},
      {"fiber_switches", static_cast<std::int64_t>(fiber_switches)},
      {"fiber_copies", static_cast<std::int64_t>(fiber_copies)},
      {"continuations_captured", static_cast<std::int64_t>(continuations_captured)},
      {"continuations_resumed", static_cast<std::int64_t>(continuations_resumed)},
      {"exn_traps", static_cast<std::int64_t>(exn_traps)},
  };
  for (const auto& [rule, n] : rule_counts) out.emplace_back("rule." + rule, static_cast<std::int64_t>(n));
  for (const auto& [depth, n] : handler_search_depths)
    out.emplace_back("handler_search_depth." + std::to_string(depth), static_cast<std::int64_t>(n));
  if (phases) {
    out.emplace_back("phase.a_b", phases->a_b);
    out.emplace_back("phase.b_c", phases->b_c);
    out.emplace_back("phase.c_d", phases->c_d);
    out.emplace_back("phase.d_e", phases->d_e);
  }
  return out;
}

FiberRuntime::FiberRuntime(RuntimeConfig cfg) : cfg_(cfg), cache_(cfg.cache_capacity) { cfg_.validate(); }

FiberMeta& FiberRuntime::get(FiberId id) {
  auto it = fibers_.find(id);
  if (it == fibers_.end()) throw std::logic_error("unknown fiber #" + std::to_string(id));
  return it->second;
}

const FiberMeta& FiberRuntime::meta(FiberId id) const {
  auto it = fibers_.find(id);
  if (it == fibers_.end()) throw std::logic_error("unknown fiber #" + std::to_string(id));
  return it->second;
}

const FiberMeta& FiberRuntime::alloc_fiber(std::optional<FiberId> parent, std::optional<std::int64_t> capacity) {
  const std::int64_t cap = capacity.value_or(cfg_.effective_initial());
  if (cache_.take(cap)) {
    ++metrics_.cache_hits;
  } else {
    ++metrics_.cache_misses;
  }
  ++metrics_.fiber_allocs;
  FiberMeta m;
  m.id = next_id_++;
  m.capacity_words = cap;
  m.parent = parent;
  return fibers_.emplace(m.id, m).first->second;
}

void FiberRuntime::free_fiber(FiberId id) {
  FiberMeta& m = get(id);
  if (m.state == FiberState::Dead) throw std::logic_error("double free of fiber #" + std::to_string(id));
  m.state = FiberState::Dead;
  m.parent.reset();
  ++metrics_.fiber_frees;
  cache_.put(m.capacity_words);
}

void FiberRuntime::grow_until(FiberMeta& m, std::int64_t needed_words) {
  while (m.capacity_words < needed_words) {
    m.capacity_words *= 2;
    ++metrics_.resizes;
  }
}

void FiberRuntime::charge_push(FiberId id, std::int64_t n_frames) {
  FiberMeta& m = get(id);
  m.used_words += n_frames * cfg_.frame_words;
  grow_until(m, m.used_words);
}

void FiberRuntime::charge_pop(FiberId id, std::int64_t n_frames) {
  FiberMeta& m = get(id);
  m.used_words = std::max<std::int64_t>(0, m.used_words - n_frames * cfg_.frame_words);
}

void FiberRuntime::overflow_check(FiberId id) {
  FiberMeta& m = get(id);
  grow_until(m, m.used_words + cfg_.red_zone_words);
}

ContId FiberRuntime::capture(std::span<const FiberId> fibers) {
  for (FiberId f : fibers) {
    if (f == kNoFiber) continue;
    FiberMeta& m = get(f);
    if (m.state == FiberState::Dead) throw std::logic_error("capturing dead fiber #" + std::to_string(f));
    m.state = FiberState::Captured;
    m.parent.reset();
  }
  ++metrics_.continuations_captured;
  return registry_.create();
}

void FiberRuntime::reinstate(std::span<const FiberId> fibers) {
  for (FiberId f : fibers)
    if (f != kNoFiber) get(f).state = FiberState::Active;
}

ResumeResult FiberRuntime::resume(ContId id, std::span<const FiberId> fibers, std::optional<FiberId> new_parent) {
  ResumeResult r;
  if (cfg_.mode == Mode::OneShot) {
    if (!registry_.consume(id)) return r;
    for (FiberId f : fibers)
      if (f != kNoFiber) get(f).state = FiberState::Active;
    r.fibers.assign(fibers.begin(), fibers.end());
  } else {
    r.fibers.reserve(fibers.size());
    for (FiberId f : fibers) {
      if (f == kNoFiber) {
        r.fibers.push_back(kNoFiber);
        continue;
      }
      const FiberMeta& orig = meta(f);
      const std::int64_t cap = orig.capacity_words, used = orig.used_words;
      FiberMeta& copy = get(alloc_fiber(std::nullopt, cap).id);
      copy.used_words = used;
      ++metrics_.fiber_copies;
      r.fibers.push_back(copy.id);
    }
  }
  // Each fiber points at the next one; the last at the resumer.
  for (std::size_t i = 0; i < r.fibers.size(); ++i) {
    if (r.fibers[i] == kNoFiber) continue;
    std::optional<FiberId> parent = new_parent;
    for (std::size_t j = i + 1; j < r.fibers.size(); ++j)
      if (r.fibers[j] != kNoFiber) {
        parent = r.fibers[j];
        break;
      }
    get(r.fibers[i]).parent = parent;
  }
  ++metrics_.continuations_resumed;
  r.ok = true;
  return r;
}

void FiberRuntime::set_parent(FiberId id, std::optional<FiberId> parent) { get(id).parent = parent; }

std::vector<ContId> FiberRuntime::leak_report() const {
  if (cfg_.mode == Mode::MultiShot) return {};
  return registry_.fresh();
}

std::size_t FiberRuntime::live_fibers() const {
  return static_cast<std::size_t>(
      std::count_if(fibers_.begin(), fibers_.end(), [](const auto& kv) { return kv.second.state != FiberState::Dead; }));
}

}  // namespace fibervm::runtime

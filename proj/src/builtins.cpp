#include "fibervm/builtins.hpp"

namespace fibervm {

CellRef Store::new_cell(Value v) {
  const auto id = next_++;
  entries_.emplace(id, std::move(v));
  return CellRef{id};
}

CellRef Store::new_queue() {
  const auto id = next_++;
  entries_.emplace(id, Queue{});
  return CellRef{id};
}

Value* Store::cell(CellRef r) {
  auto it = entries_.find(r.id);
  return it == entries_.end() ? nullptr : std::get_if<Value>(&it->second);
}

Store::Queue* Store::queue(CellRef r) {
  auto it = entries_.find(r.id);
  return it == entries_.end() ? nullptr : std::get_if<Queue>(&it->second);
}

std::optional<std::int64_t> Store::read_channel(std::int64_t c) {
  std::int64_t& n = reads_[c];
  if (n >= kChannelLines) return std::nullopt;
  ++n;
  return 100 * c + n;
}

namespace {

std::optional<std::int64_t> int_arg(const Value& v) {
  if (const auto* i = v.get<IntVal>()) return i->n;
  return std::nullopt;
}

PrimResult bad_arg() { return labels::kInvalidArgument; }

Store::Queue* queue_arg(const Value& v, Store& s) {
  const auto* r = v.get<CellRef>();
  return r ? s.queue(*r) : nullptr;
}

std::vector<Builtin> make_table() {
  std::vector<Builtin> t;
  t.push_back({"ref_new", 1, [](std::span<const Value> a, Store& s) -> PrimResult { return Value{s.new_cell(a[0])}; }});
  t.push_back({"ref_get", 1, [](std::span<const Value> a, Store& s) -> PrimResult {
                 const auto* r = a[0].get<CellRef>();
                 Value* c = r ? s.cell(*r) : nullptr;
                 if (!c) return bad_arg();
                 return *c;
               }});
  t.push_back({"ref_set", 2, [](std::span<const Value> a, Store& s) -> PrimResult {
                 const auto* r = a[0].get<CellRef>();
                 Value* c = r ? s.cell(*r) : nullptr;
                 if (!c) return bad_arg();
                 *c = a[1];
                 return int_value(0);
               }});
  // Queues pop from the front; stacks share the representation and pop the
  // most recent push.
  t.push_back({"queue_new", 0, [](std::span<const Value>, Store& s) -> PrimResult { return Value{s.new_queue()}; }});
  t.push_back({"stack_new", 0, [](std::span<const Value>, Store& s) -> PrimResult { return Value{s.new_queue()}; }});
  auto push = [](std::span<const Value> a, Store& s) -> PrimResult {
    auto* q = queue_arg(a[0], s);
    if (!q) return bad_arg();
    q->push_back(a[1]);
    return int_value(0);
  };
  t.push_back({"queue_push", 2, push});
  t.push_back({"stack_push", 2, push});
  t.push_back({"queue_pop", 1, [](std::span<const Value> a, Store& s) -> PrimResult {
                 auto* q = queue_arg(a[0], s);
                 if (!q) return bad_arg();
                 if (q->empty()) return labels::kQueueEmpty;
                 Value v = q->front();
                 q->pop_front();
                 return v;
               }});
  t.push_back({"stack_pop", 1, [](std::span<const Value> a, Store& s) -> PrimResult {
                 auto* q = queue_arg(a[0], s);
                 if (!q) return bad_arg();
                 if (q->empty()) return labels::kStackEmpty;
                 Value v = q->back();
                 q->pop_back();
                 return v;
               }});
  t.push_back({"queue_length", 1, [](std::span<const Value> a, Store& s) -> PrimResult {
                 auto* q = queue_arg(a[0], s);
                 if (!q) return bad_arg();
                 return int_value(static_cast<std::int64_t>(q->size()));
               }});
  t.push_back({"print_int", 1, [](std::span<const Value> a, Store& s) -> PrimResult {
                 auto n = int_arg(a[0]);
                 if (!n) return bad_arg();
                 s.emit(std::to_string(*n));
                 return int_value(0);
               }});
  t.push_back({"print_tag", 2, [](std::span<const Value> a, Store& s) -> PrimResult {
                 auto tag = int_arg(a[0]);
                 auto n = int_arg(a[1]);
                 if (!tag || !n) return bad_arg();
                 s.emit("[" + std::to_string(*tag) + "] " + std::to_string(*n));
                 return int_value(0);
               }});
  t.push_back({"assert_eq", 2, [](std::span<const Value> a, Store&) -> PrimResult {
                 auto x = int_arg(a[0]);
                 auto y = int_arg(a[1]);
                 if (!x || !y) return bad_arg();
                 if (*x != *y) return labels::kAssertFailure;
                 return int_value(0);
               }});
  t.push_back({"ifz", 3, [](std::span<const Value> a, Store&) -> PrimResult {
                 auto n = int_arg(a[0]);
                 if (!n) return bad_arg();
                 return *n == 0 ? a[1] : a[2];
               }});
  t.push_back({"eq", 2, [](std::span<const Value> a, Store&) -> PrimResult {
                 auto x = int_arg(a[0]);
                 auto y = int_arg(a[1]);
                 if (!x || !y) return bad_arg();
                 return int_value(*x == *y ? 1 : 0);
               }});
  t.push_back({"lt", 2, [](std::span<const Value> a, Store&) -> PrimResult {
                 auto x = int_arg(a[0]);
                 auto y = int_arg(a[1]);
                 if (!x || !y) return bad_arg();
                 return int_value(*x < *y ? 1 : 0);
               }});
  t.push_back({"chan_read", 1, [](std::span<const Value> a, Store& s) -> PrimResult {
                 auto c = int_arg(a[0]);
                 if (!c) return bad_arg();
                 auto line = s.read_channel(*c);
                 if (!line) return labels::kEndOfFile;
                 return int_value(*line);
               }});
  t.push_back({"close_chan", 1, [](std::span<const Value> a, Store& s) -> PrimResult {
                 auto c = int_arg(a[0]);
                 if (!c) return bad_arg();
                 s.emit("closed " + std::to_string(*c));
                 return int_value(0);
               }});
  // Simulated event loop: reports how many reads at the front of the pending
  // queue have completed.
  t.push_back({"do_reads", 1, [](std::span<const Value> a, Store& s) -> PrimResult {
                 auto* q = queue_arg(a[0], s);
                 if (!q) return bad_arg();
                 const auto len = static_cast<std::int64_t>(q->size());
                 const auto ready = s.io_batch <= 0 ? len : std::min(s.io_batch, len);
                 return int_value(ready);
               }});
  return t;
}

}  // namespace

const std::vector<Builtin>& builtin_table() {
  static const std::vector<Builtin> table = make_table();
  return table;
}

const Builtin* find_builtin(std::string_view name) {
  for (const auto& b : builtin_table())
    if (b.name == name) return &b;
  return nullptr;
}

}  // namespace fibervm

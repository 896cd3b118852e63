#pragma once

#include <cstdint>
#include <deque>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "fibervm/values.hpp"

namespace fibervm {

/// Mutable state reachable only through builtins: cells, queues, simulated
/// channels and the program's output log.
class Store {
 public:
  using Queue = std::deque<Value>;

  CellRef new_cell(Value v);
  CellRef new_queue();
  Value* cell(CellRef r);
  Queue* queue(CellRef r);

  /// Every value held in a cell or queue.
  template <class F>
  void for_each_value(F&& f) const {
    for (const auto& [id, e] : entries_) {
      if (const auto* v = std::get_if<Value>(&e)) f(*v);
      else
        for (const Value& v : std::get<Queue>(e)) f(v);
    }
  }

  void emit(std::string line) { output_.push_back(std::move(line)); }
  [[nodiscard]] const std::vector<std::string>& output() const { return output_; }

  /// Lines a simulated channel yields before End_of_file.
  static constexpr std::int64_t kChannelLines = 3;
  /// Next line of channel c: 100*c + i for the i-th read.
  std::optional<std::int64_t> read_channel(std::int64_t c);

  /// How many pending reads one do_reads call completes; <= 0 completes all.
  std::int64_t io_batch = 1;

 private:
  std::uint64_t next_ = 1;
  std::map<std::uint64_t, std::variant<Value, Queue>> entries_;
  std::map<std::int64_t, std::int64_t> reads_;
  std::vector<std::string> output_;
};

/// Result of a native call: a value, or a label to raise at the call site.
using PrimResult = std::variant<Value, Label>;

struct Builtin {
  std::string name;
  /// Number of arguments; arity-0 builtins are applied to a dummy argument.
  std::size_t arity;
  std::function<PrimResult(std::span<const Value>, Store&)> fn;

  [[nodiscard]] std::size_t applications() const { return arity == 0 ? 1 : arity; }
};

const std::vector<Builtin>& builtin_table();
const Builtin* find_builtin(std::string_view name);

}  // namespace fibervm

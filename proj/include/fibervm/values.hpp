#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "fibervm/plist.hpp"
#include "fibervm/runtime.hpp"
#include "fibervm/syntax.hpp"

namespace fibervm {

using runtime::ContId;
using runtime::FiberId;
using runtime::kNoFiber;

struct Value;
struct Binding;
struct Frame;
struct Fiber;

/// Environments are persistent association lists; the innermost binding wins.
using Env = PList<Binding>;
using FrameList = PList<Frame>;
/// Head is the innermost fiber.
using Continuation = PList<Fiber>;

struct HandlerClosure {
  HandlerPtr spec;
  Env env;
};

struct IntVal {
  std::int64_t n;
};
struct Closure {
  LamKind kind;
  std::string param;
  ExprPtr body;
  Env env;
};
struct Kont {
  Continuation k;
  ContId id;
};
struct EffVal {
  Label label;
  Continuation k;
};
struct ExnVal {
  Label label;
};
/// A builtin, possibly partially applied.
struct PrimRef {
  std::string name;
  std::shared_ptr<const std::vector<Value>> args;
};
struct CellRef {
  std::uint64_t id;
};

struct Value {
  std::variant<IntVal, Closure, Kont, EffVal, ExnVal, PrimRef, CellRef> v;

  template <class T>
  [[nodiscard]] const T* get() const {
    return std::get_if<T>(&v);
  }
  template <class T>
  [[nodiscard]] bool is() const {
    return std::holds_alternative<T>(v);
  }
};

Value int_value(std::int64_t n);

struct Binding {
  std::string name;
  Value value;
};

std::optional<Value> lookup(const Env& env, const std::string& name);
Env extend(const Env& env, std::string name, Value v);

struct ArgFrame {
  ExprPtr expr;
  Env env;
};
struct FunFrame {
  Value value;
};
struct Arith1Frame {
  ArithOp op;
  ExprPtr rhs;
  Env env;
};
struct Arith2Frame {
  ArithOp op;
  std::int64_t lhs;
};
/// Linked exception-handler frame used by the exception fast path.
struct TrapFrame {
  HandlerClosure handler;
};

struct Frame {
  std::variant<ArgFrame, FunFrame, Arith1Frame, Arith2Frame, TrapFrame> f;

  template <class T>
  [[nodiscard]] const T* get() const {
    return std::get_if<T>(&f);
  }
};

/// A fiber is a frame list delimited by a handler. `id` names its runtime
/// metadata; the identity-handler fiber created by Perform has none.
struct Fiber {
  FrameList frames;
  HandlerClosure handler;
  FiberId id = kNoFiber;
};

enum class SegmentKind : std::uint8_t { C, OCaml };

/// One segment of the alternating C/OCaml stack.
struct Segment {
  SegmentKind kind;
  FrameList frames;  // C segments
  Continuation k;    // OCaml segments, never empty
  std::uint64_t c_id = 0;
};

/// Top segment first; the chain ends in a C segment sitting on the empty
/// OCaml stack.
using Stack = PList<Segment>;

Segment c_segment(FrameList frames, std::uint64_t id);
Segment o_segment(Continuation k);

using Term = std::variant<ExprPtr, Value>;

struct Configuration {
  Term term;
  Env env;
  Stack stack;
};

/// The term as a value, if it is one (integer constants are values).
std::optional<Value> term_value(const Term& t);

/// Alternation check: C and OCaml segments alternate, OCaml segments are
/// non-empty, and the bottom segment is C.
bool stack_well_formed(const Stack& s);

std::string show(const Value& v);
std::string show(const Frame& f);
std::string show(const Term& t);

}  // namespace fibervm

#include "fibervm/values.hpp"

#include <sstream>

namespace fibervm {

Value int_value(std::int64_t n) { return Value{IntVal{n}}; }

std::optional<Value> lookup(const Env& env, const std::string& name) {
  for (const Binding& b : env)
    if (b.name == name) return b.value;
  return std::nullopt;
}

Env extend(const Env& env, std::string name, Value v) { return env.push(Binding{std::move(name), std::move(v)}); }

Segment c_segment(FrameList frames, std::uint64_t id) { return Segment{SegmentKind::C, std::move(frames), {}, id}; }

Segment o_segment(Continuation k) { return Segment{SegmentKind::OCaml, {}, std::move(k), 0}; }

std::optional<Value> term_value(const Term& t) {
  if (const auto* v = std::get_if<Value>(&t)) return *v;
  const auto& e = std::get<ExprPtr>(t);
  if (const auto* n = std::get_if<IntConst>(&e->node)) return int_value(n->value);
  return std::nullopt;
}

bool stack_well_formed(const Stack& s) {
  if (s.empty()) return false;
  std::optional<SegmentKind> prev;
  for (const Segment& seg : s) {
    if (prev && *prev == seg.kind) return false;
    if (seg.kind == SegmentKind::OCaml && seg.k.empty()) return false;
    prev = seg.kind;
  }
  return *prev == SegmentKind::C;
}

namespace {
std::string clip(std::string s, std::size_t n = 40) {
  if (s.size() > n) {
    s.resize(n - 3);
    s += "...";
  }
  return s;
}
}  // namespace

std::string show(const Value& v) {
  return std::visit(
      [](const auto& x) -> std::string {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, IntVal>) {
          return std::to_string(x.n);
        } else if constexpr (std::is_same_v<T, Closure>) {
          return std::string(x.kind == LamKind::OCaml ? "<fun " : "<cfun ") + x.param + ">";
        } else if constexpr (std::is_same_v<T, Kont>) {
          return "<continuation #" + std::to_string(x.id) + ">";
        } else if constexpr (std::is_same_v<T, EffVal>) {
          return "<eff " + x.label.name + ">";
        } else if constexpr (std::is_same_v<T, ExnVal>) {
          return "<exn " + x.label.name + ">";
        } else if constexpr (std::is_same_v<T, PrimRef>) {
          return "<prim " + x.name + "/" + std::to_string(x.args ? x.args->size() : 0) + ">";
        } else {
          return "<ref #" + std::to_string(x.id) + ">";
        }
      },
      v.v);
}

std::string show(const Frame& f) {
  return std::visit(
      [](const auto& x) -> std::string {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, ArgFrame>) {
          return "arg " + clip(print(x.expr));
        } else if constexpr (std::is_same_v<T, FunFrame>) {
          return "fun " + show(x.value);
        } else if constexpr (std::is_same_v<T, Arith1Frame>) {
          return std::string("arith (") + to_string(x.op) + " _ " + clip(print(x.rhs), 30) + ")";
        } else if constexpr (std::is_same_v<T, Arith2Frame>) {
          return std::string("arith (") + to_string(x.op) + " " + std::to_string(x.lhs) + " _)";
        } else {
          std::string s = "trap [";
          bool first = true;
          for (const auto& c : x.handler.spec->exn_cases) {
            s += (first ? "" : " ") + c.label.name;
            first = false;
          }
          return s + "]";
        }
      },
      f.f);
}

std::string show(const Term& t) {
  if (const auto* v = std::get_if<Value>(&t)) return show(*v);
  return clip(print(std::get<ExprPtr>(t)), 60);
}

}  // namespace fibervm

#pragma once

#include <string>

#include "fibervm/machine.hpp"
#include "fibervm/parser.hpp"

namespace th {

using namespace fibervm;

inline ExprPtr P(const std::string& src) { return parse(src); }

inline RunResult run_src(const std::string& src, RunOptions opts = {}) {
  return run(program_from_text(src).entry, opts);
}

inline Value I(std::int64_t n) { return int_value(n); }

inline Frame arg(ExprPtr e, Env env = {}) { return Frame{ArgFrame{std::move(e), std::move(env)}}; }
inline Frame fun(Value v) { return Frame{FunFrame{std::move(v)}}; }

inline Value oclo(const std::string& param, const std::string& body, Env env = {}) {
  return Value{Closure{LamKind::OCaml, param, P(body), std::move(env)}};
}
inline Value cclo(const std::string& param, const std::string& body, Env env = {}) {
  return Value{Closure{LamKind::C, param, P(body), std::move(env)}};
}

inline HandlerPtr handler_of(const std::string& handle_src) {
  ExprPtr e = P(handle_src);
  return std::get<Handle>(e->node).handler;
}

inline Fiber fiber(FrameList frames, HandlerPtr h, Env henv = {}, FiberId id = kNoFiber) {
  return Fiber{std::move(frames), HandlerClosure{std::move(h), std::move(henv)}, id};
}

inline std::optional<std::int64_t> int_of(const Term& t) {
  auto v = term_value(t);
  if (!v) return std::nullopt;
  if (const auto* i = v->get<IntVal>()) return i->n;
  return std::nullopt;
}

inline bool expr_is(const Term& t, const std::string& src) {
  const auto* e = std::get_if<ExprPtr>(&t);
  return e && equal(*e, P(src));
}

inline std::int64_t env_int(const Env& env, const std::string& name) {
  auto v = lookup(env, name);
  if (!v || !v->is<IntVal>()) return INT64_MIN;
  return v->get<IntVal>()->n;
}

}  // namespace th

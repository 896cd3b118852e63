#include "fibervm/machine.hpp"

#include <algorithm>
#include <functional>
#include <type_traits>
#include <unordered_set>
#include <limits>
#include <stdexcept>

namespace fibervm {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

FiberId first_real(const Continuation& k) {
  for (const Fiber& f : k)
    if (f.id != kNoFiber) return f.id;
  return kNoFiber;
}

std::vector<FiberId> ids_of(const Continuation& k) {
  std::vector<FiberId> out;
  out.reserve(k.size());
  for (const Fiber& f : k) out.push_back(f.id);
  return out;
}

Fiber identity_fiber(FiberId id = kNoFiber) { return Fiber{{}, HandlerClosure{identity_handler(), {}}, id}; }

Frame fun_frame(Value v) { return Frame{FunFrame{std::move(v)}}; }

std::int64_t wrap(ArithOp op, std::int64_t a, std::int64_t b) {
  const auto ua = static_cast<std::uint64_t>(a), ub = static_cast<std::uint64_t>(b);
  switch (op) {
    case ArithOp::Add: return static_cast<std::int64_t>(ua + ub);
    case ArithOp::Sub: return static_cast<std::int64_t>(ua - ub);
    case ArithOp::Mul: return static_cast<std::int64_t>(ua * ub);
    case ArithOp::Div:
      if (a == std::numeric_limits<std::int64_t>::min() && b == -1) return a;
      return a / b;
  }
  return 0;
}

AdminOutcome admin_value(const Value& v, const Env& env, const FrameList& frames) {
  if (frames.empty()) return NoAdminRule{};
  const Frame& top = frames.head();
  const FrameList& rest = frames.tail();
  if (const auto* a1 = top.get<Arith1Frame>()) {
    const auto* n = v.get<IntVal>();
    if (!n) return NoAdminRule{};
    return AdminStep{a1->rhs, a1->env, rest.push(Frame{Arith2Frame{a1->op, n->n}}), Rule::Arith2};
  }
  if (const auto* a2 = top.get<Arith2Frame>()) {
    const auto* n = v.get<IntVal>();
    if (!n) return NoAdminRule{};
    if (a2->op == ArithOp::Div && n->n == 0)
      return AdminStep{mk_raise(labels::kDivisionByZero, mk_int(0)), env, rest, Rule::Arith3};
    return AdminStep{int_value(wrap(a2->op, a2->lhs, n->n)), env, rest, Rule::Arith3};
  }
  if (const auto* arg = top.get<ArgFrame>()) {
    if (v.is<Closure>() || v.is<PrimRef>()) return AdminStep{arg->expr, arg->env, rest.push(fun_frame(v)), Rule::App3};
    if (v.is<Kont>() && !rest.empty() && rest.head().get<ArgFrame>())
      return AdminStep{arg->expr, arg->env, rest.push(fun_frame(v)), Rule::Resume1};
    return NoAdminRule{};
  }
  if (const auto* fun = top.get<FunFrame>()) {
    if (fun->value.is<Kont>() && v.is<Closure>() && !rest.empty()) {
      if (const auto* arg2 = rest.head().get<ArgFrame>())
        return AdminStep{arg2->expr, arg2->env, rest.tail().push(fun_frame(v)).push(top), Rule::Resume2};
    }
  }
  return NoAdminRule{};
}

}  // namespace

std::string to_string(FatalKind k) {
  switch (k) {
    case FatalKind::UncaughtException: return "UncaughtException";
    case FatalKind::StuckInC: return "StuckInC";
    case FatalKind::StuckOther: return "StuckOther";
  }
  return "?";
}

AdminOutcome admin_step(const Term& term, const Env& env, const FrameList& frames) {
  if (auto v = term_value(term)) return admin_value(*v, env, frames);
  const Expr& e = *std::get<ExprPtr>(term);
  return std::visit(
      overloaded{
          [&](const Var& x) -> AdminOutcome {
            if (auto v = lookup(env, x.name)) return AdminStep{*v, env, frames, Rule::Var};
            if (find_builtin(x.name))
              return AdminStep{Value{PrimRef{x.name, std::make_shared<const std::vector<Value>>()}}, env, frames,
                               Rule::Var};
            return AdminError{"unbound variable " + x.name};
          },
          [&](const Arith& a) -> AdminOutcome {
            return AdminStep{a.lhs, env, frames.push(Frame{Arith1Frame{a.op, a.rhs, env}}), Rule::Arith1};
          },
          [&](const App& a) -> AdminOutcome {
            return AdminStep{a.fn, env, frames.push(Frame{ArgFrame{a.arg, env}}), Rule::App1};
          },
          [&](const Lam& l) -> AdminOutcome {
            return AdminStep{Value{Closure{l.kind, l.param, l.body, env}}, env, frames, Rule::App2};
          },
          [&](const Raise& r) -> AdminOutcome {
            return AdminStep{r.payload, env, frames.push(fun_frame(Value{ExnVal{r.label}})), Rule::Raise};
          },
          [&](const Perform& p) -> AdminOutcome {
            Value eff{EffVal{p.label, Continuation::of({identity_fiber()})}};
            return AdminStep{p.payload, env, frames.push(fun_frame(std::move(eff))), Rule::Perform};
          },
          [&](const auto&) -> AdminOutcome { return NoAdminRule{}; },
      },
      e.node);
}

Configuration initial_config(ExprPtr e) {
  return Configuration{std::move(e), Env{}, Stack{}.push(c_segment({}, 0))};
}

std::string RunResult::headline() const {
  switch (status) {
    case Status::Done: return "=> " + show(*value);
    case Status::Fatal: {
      std::string s = "fatal: " + to_string(fatal->kind);
      if (fatal->label) s += "(" + fatal->label->name + ")";
      return s;
    }
    case Status::StepBudgetExceeded: return "step budget exceeded";
  }
  return "";
}

bool RunResult::observably_equal(const RunResult& other) const {
  return status == other.status && headline() == other.headline() && output == other.output;
}

Machine::Machine(ExprPtr entry, RunOptions opts) : Machine(initial_config(std::move(entry)), std::move(opts)) {}

Machine::Machine(Configuration config, RunOptions opts)
    : opts_(std::move(opts)), cfg_(std::move(config)), rt_(opts_.runtime) {
  store_.io_batch = opts_.io_batch;
  for (const Segment& s : cfg_.stack)
    if (s.kind == SegmentKind::C) next_c_id_ = std::max(next_c_id_, s.c_id + 1);
}

Context Machine::context() const {
  if (cfg_.stack.empty()) return {};
  const Segment& top = cfg_.stack.head();
  if (top.kind == SegmentKind::C) return Context{SegmentKind::C, top.c_id};
  return Context{SegmentKind::OCaml, first_real(top.k)};
}

runtime::Metrics Machine::metrics() const {
  runtime::Metrics m = rt_.metrics();
  for (std::size_t i = 0; i < kRuleCount; ++i)
    if (rule_counts_[i]) m.rule_counts[std::string(rule_name(static_cast<Rule>(i)))] = rule_counts_[i];
  return m;
}

FiberId Machine::alloc_fiber(FiberId parent) {
  std::optional<FiberId> p;
  if (parent != kNoFiber) p = parent;
  return rt_.alloc_fiber(p).id;
}

void Machine::free_fiber(FiberId id) {
  if (id != kNoFiber) rt_.free_fiber(id);
}

StepOutcome Machine::stuck(FatalKind kind, std::string message) const {
  StepOutcome out;
  out.kind = StepOutcome::Kind::Fatal;
  out.fatal = Fatal{kind, std::nullopt, std::move(message), backtrace(cfg_)};
  return out;
}

StepOutcome Machine::step() {
  if (cfg_.stack.empty()) throw std::logic_error("empty stack");
  const Context before = context();
  const Segment top = cfg_.stack.head();
  const Stack below = cfg_.stack.tail();
  subject_ = kNoFiber;
  checked_point_ = false;
  StepOutcome out = top.kind == SegmentKind::C ? c_step(top, below) : o_step(top, below);
  if (out.kind == StepOutcome::Kind::Next) after_step(out, before);
  return out;
}

StepOutcome Machine::c_step(const Segment& top, const Stack& below) {
  StepOutcome out;
  const FrameList& fl = top.frames;
  const auto v = term_value(cfg_.term);
  if (v) {
    if (fl.empty()) {
      if (below.empty()) {
        out.kind = StepOutcome::Kind::Done;
        out.value = *v;
        return out;
      }
      cfg_.term = *v;
      cfg_.stack = below;
      out.rule = Rule::RetToO;
      return out;
    }
    if (const auto* fun = fl.head().get<FunFrame>()) {
      if (const auto* exn = fun->value.get<ExnVal>()) {
        if (below.empty()) {
          StepOutcome f;
          f.kind = StepOutcome::Kind::Fatal;
          f.fatal = Fatal{FatalKind::UncaughtException, exn->label, "uncaught exception " + exn->label.name + " " + show(*v),
                          backtrace(cfg_)};
          return f;
        }
        Segment o = below.head();
        Fiber fib = o.k.head();
        fib.frames = fib.frames.push(fl.head());
        o.k = o.k.tail().push(std::move(fib));
        cfg_.term = *v;
        cfg_.stack = below.tail().push(std::move(o));
        out.rule = Rule::ExnFwdO;
        return out;
      }
      if (const auto* clo = fun->value.get<Closure>()) {
        const Stack rest = below.push(c_segment(fl.tail(), top.c_id));
        if (clo->kind == LamKind::C) {
          cfg_ = Configuration{clo->body, extend(clo->env, clo->param, *v), rest};
          out.rule = Rule::CallC;
        } else {
          FiberId parent = kNoFiber;
          if (!below.empty()) parent = first_real(below.head().k);
          const FiberId id = alloc_fiber(parent);
          cfg_ = Configuration{clo->body, extend(clo->env, clo->param, *v),
                               rest.push(o_segment(Continuation::of({identity_fiber(id)})))};
          subject_ = id;
          out.rule = Rule::Callback;
        }
        return out;
      }
      if (const auto* prim = fun->value.get<PrimRef>()) {
        const Builtin* b = find_builtin(prim->name);
        if (!b) return stuck(FatalKind::StuckOther, "unknown builtin " + prim->name);
        auto args = std::make_shared<std::vector<Value>>(*prim->args);
        args->push_back(*v);
        Term result;
        if (args->size() < b->applications()) {
          result = Value{PrimRef{prim->name, std::move(args)}};
        } else {
          std::span<const Value> actual(*args);
          if (b->arity == 0) actual = {};
          PrimResult r = b->fn(actual, store_);
          if (auto* rv = std::get_if<Value>(&r))
            result = std::move(*rv);
          else
            result = mk_raise(std::get<Label>(r), mk_int(0));
        }
        cfg_.term = std::move(result);
        cfg_.stack = below.push(c_segment(fl.tail(), top.c_id));
        out.rule = Rule::CallPrim;
        return out;
      }
    }
  }
  AdminOutcome a = admin_step(cfg_.term, cfg_.env, fl);
  if (auto* s = std::get_if<AdminStep>(&a)) {
    cfg_ = Configuration{std::move(s->term), std::move(s->env), below.push(c_segment(std::move(s->frames), top.c_id))};
    out.rule = Rule::AdminC;
    out.admin = s->rule;
    return out;
  }
  if (auto* err = std::get_if<AdminError>(&a)) return stuck(FatalKind::StuckOther, err->message);

  if (const auto* e = std::get_if<ExprPtr>(&cfg_.term); e && std::holds_alternative<Handle>((*e)->node))
    return stuck(FatalKind::StuckInC, "handler installed in C code");
  if (v && !fl.empty()) {
    if (const auto* fun = fl.head().get<FunFrame>()) {
      if (const auto* eff = fun->value.get<EffVal>())
        return stuck(FatalKind::StuckInC, "effect " + eff->label.name + " performed in C code");
      if (fun->value.is<Kont>()) return stuck(FatalKind::StuckInC, "continuation resumed in C code");
    }
  }
  return stuck(FatalKind::StuckOther, "no rule applies to " + show(cfg_.term) +
                                          (fl.empty() ? std::string() : " under " + show(fl.head())));
}

StepOutcome Machine::o_step(const Segment& top, const Stack& below) {
  StepOutcome out;
  const Continuation& k = top.k;
  const Fiber& f = k.head();
  const Continuation& rest = k.tail();
  const HandlerSpec& h = *f.handler.spec;
  const auto v = term_value(cfg_.term);

  auto with_fiber = [&](FrameList frames) {
    return below.push(o_segment(rest.push(Fiber{std::move(frames), f.handler, f.id})));
  };
  auto with_rest = [&]() { return below.push(o_segment(rest)); };

  if (!v) {
    const Expr& e = *std::get<ExprPtr>(cfg_.term);
    if (const auto* hd = std::get_if<Handle>(&e.node)) {
      if (opts_.opt_exn && hd->handler->eff_cases.empty()) {
        cfg_.stack = with_fiber(f.frames.push(Frame{TrapFrame{HandlerClosure{hd->handler, cfg_.env}}}));
        cfg_.term = hd->body;
        ++rt_.metrics().exn_traps;
        subject_ = first_real(k);
        out.rule = Rule::TrapPush;
        return out;
      }
      const FiberId id = alloc_fiber(first_real(k));
      cfg_.stack = below.push(o_segment(k.push(Fiber{{}, HandlerClosure{hd->handler, cfg_.env}, id})));
      cfg_.term = hd->body;
      subject_ = id;
      checked_point_ = true;
      out.rule = Rule::Handle;
      return out;
    }
  } else if (f.frames.empty()) {
    if (rest.empty()) {
      if (!h.is_identity() || !f.handler.env.empty())
        return stuck(FatalKind::StuckOther, "value returned to a non-identity handler at the bottom of an OCaml stack");
      free_fiber(f.id);
      subject_ = f.id;
      cfg_.term = *v;
      cfg_.stack = below;
      out.rule = Rule::RetToC;
      return out;
    }
    free_fiber(f.id);
    subject_ = f.id;
    cfg_ = Configuration{h.value_case.body, extend(f.handler.env, h.value_case.param, *v), with_rest()};
    out.rule = Rule::RetFib;
    return out;
  } else {
    const Frame& fr = f.frames.head();
    const FrameList& fl = f.frames.tail();
    if (const auto* trap = fr.get<TrapFrame>()) {
      const ValueCase& vc = trap->handler.spec->value_case;
      cfg_ = Configuration{vc.body, extend(trap->handler.env, vc.param, *v), with_fiber(fl)};
      subject_ = first_real(k);
      out.rule = Rule::TrapPop;
      return out;
    }
    if (const auto* fun = fr.get<FunFrame>()) {
      const Value& fv = fun->value;
      if (const auto* clo = fv.get<Closure>()) {
        if (clo->kind == LamKind::OCaml) {
          cfg_ = Configuration{clo->body, extend(clo->env, clo->param, *v), with_fiber(fl)};
          checked_point_ = true;
          out.rule = Rule::CallO;
        } else {
          cfg_ = Configuration{clo->body, extend(clo->env, clo->param, *v),
                               with_fiber(fl).push(c_segment({}, new_c_segment()))};
          out.rule = Rule::ExtCall;
        }
        return out;
      }
      if (fv.is<PrimRef>()) {
        cfg_.term = *v;
        cfg_.stack = with_fiber(fl).push(c_segment(FrameList{}.push(fr), new_c_segment()));
        out.rule = Rule::ExtCall;
        return out;
      }
      if (const auto* exn = fv.get<ExnVal>()) {
        if (opts_.opt_exn) {
          // Unwind to the nearest trap of this fiber, if any.
          for (FrameList it = fl; !it.empty(); it = it.tail()) {
            const auto* trap = it.head().get<TrapFrame>();
            if (!trap) continue;
            const FrameList after = it.tail();
            if (const ExnCase* c = trap->handler.spec->find_exn(exn->label)) {
              cfg_ = Configuration{c->body, extend(trap->handler.env, c->param, *v), with_fiber(after)};
            } else {
              cfg_.term = *v;
              cfg_.stack = with_fiber(after.push(fr));
            }
            subject_ = first_real(k);
            out.rule = Rule::TrapRaise;
            return out;
          }
        }
        if (const ExnCase* c = h.find_exn(exn->label)) {
          if (rest.empty())
            return stuck(FatalKind::StuckOther, "exception handler fiber at the bottom of an OCaml stack");
          free_fiber(f.id);
          subject_ = f.id;
          cfg_ = Configuration{c->body, extend(f.handler.env, c->param, *v), with_rest()};
          out.rule = Rule::ExnHn;
          return out;
        }
        free_fiber(f.id);
        subject_ = f.id;
        cfg_.term = *v;
        if (rest.empty()) {
          const Segment& cseg = below.head();
          cfg_.stack = below.tail().push(c_segment(cseg.frames.push(fr), cseg.c_id));
          out.rule = Rule::ExnFwdC;
        } else {
          Fiber next = rest.head();
          next.frames = next.frames.push(fr);
          cfg_.stack = below.push(o_segment(rest.tail().push(std::move(next))));
          out.rule = Rule::ExnFwdFib;
        }
        return out;
      }
      if (const auto* eff = fv.get<EffVal>()) {
        const Fiber captured{fl, f.handler, f.id};
        const Continuation k2 = Continuation::append(eff->k, Continuation::of({captured}));
        subject_ = f.id;
        if (const EffCase* c = h.find_eff(eff->label)) {
          if (rest.empty())
            return stuck(FatalKind::StuckOther, "effect handler fiber at the bottom of an OCaml stack");
          const auto ids = ids_of(k2);
          const ContId cid = rt_.capture(ids);
          if (rt_.config().mode == runtime::Mode::OneShot) fresh_konts_.emplace(cid, k2);
          ++rt_.metrics().handler_search_depths[static_cast<std::int64_t>(k2.size()) - 1];
          Env env = extend(extend(f.handler.env, c->kont_param, Value{Kont{k2, cid}}), c->param, *v);
          cfg_ = Configuration{c->body, std::move(env), with_rest()};
          out.rule = Rule::EffHn;
          return out;
        }
        if (rest.empty()) {
          const auto ids = ids_of(eff->k);
          rt_.reinstate(ids);
          cfg_ = Configuration{mk_raise(labels::kUnhandled, mk_int(0)), Env{}, below.push(o_segment(k2))};
          out.rule = Rule::EffUnHn;
          return out;
        }
        Fiber next = rest.head();
        next.frames = next.frames.push(fun_frame(Value{EffVal{eff->label, k2}}));
        cfg_.term = *v;
        cfg_.stack = below.push(o_segment(rest.tail().push(std::move(next))));
        out.rule = Rule::EffFwd;
        return out;
      }
      if (const auto* kont = fv.get<Kont>(); kont && !fl.empty()) {
        const auto* cf = fl.head().get<FunFrame>();
        const Closure* clo = cf ? cf->value.get<Closure>() : nullptr;
        if (clo && clo->kind == LamKind::OCaml) {
          const FrameList after = fl.tail();
          const FiberId parent = f.id != kNoFiber ? f.id : first_real(rest);
          std::optional<FiberId> p;
          if (parent != kNoFiber) p = parent;
          const auto ids = ids_of(kont->k);
          runtime::ResumeResult res = rt_.resume(kont->id, ids, p);
          out.rule = Rule::Resume;
          if (!res.ok) {
            cfg_.term = mk_raise(labels::kInvalidArgument, mk_int(0));
            cfg_.stack = with_fiber(after);
            subject_ = first_real(k);
            return out;
          }
          fresh_konts_.erase(kont->id);
          Continuation resumed = kont->k;
          if (res.fibers != ids) {
            std::vector<Fiber> fibers = kont->k.to_vector();
            for (std::size_t i = 0; i < fibers.size(); ++i) fibers[i].id = res.fibers[i];
            resumed = Continuation::from_vector(fibers);
          }
          const Continuation below_k = rest.push(Fiber{after, f.handler, f.id});
          cfg_ = Configuration{clo->body, extend(clo->env, clo->param, *v),
                               below.push(o_segment(Continuation::append(resumed, below_k)))};
          subject_ = first_real(resumed);
          checked_point_ = true;
          return out;
        }
      }
    }
  }

  AdminOutcome a = admin_step(cfg_.term, cfg_.env, f.frames);
  if (auto* s = std::get_if<AdminStep>(&a)) {
    cfg_.term = std::move(s->term);
    cfg_.env = std::move(s->env);
    cfg_.stack = with_fiber(std::move(s->frames));
    out.rule = Rule::AdminO;
    out.admin = s->rule;
    return out;
  }
  if (auto* err = std::get_if<AdminError>(&a)) return stuck(FatalKind::StuckOther, err->message);
  return stuck(FatalKind::StuckOther, "no rule applies to " + show(cfg_.term) +
                                          (f.frames.empty() ? std::string() : " under " + show(f.frames.head())));
}

void Machine::sync_top_fiber() {
  const Segment& top = cfg_.stack.head();
  if (top.kind != SegmentKind::OCaml) return;
  const Fiber& f = top.k.head();
  if (f.id == kNoFiber) return;
  const auto& m = rt_.meta(f.id);
  const std::int64_t fw = rt_.config().frame_words;
  const auto frames = static_cast<std::int64_t>(f.frames.size());
  const std::int64_t delta = frames - m.used_words / fw;
  if (delta > 0) rt_.charge_push(f.id, delta);
  if (delta < 0) rt_.charge_pop(f.id, -delta);
}

void Machine::checkpoint() {
  const Segment& top = cfg_.stack.head();
  if (top.kind != SegmentKind::OCaml) return;
  const FiberId id = first_real(top.k);
  if (id != kNoFiber) rt_.overflow_check(id);
}

void Machine::after_step(const StepOutcome& out, const Context& before) {
  auto& m = rt_.metrics();
  ++m.steps_total;
  ++rule_counts_[static_cast<std::size_t>(out.rule)];
  if (out.admin) ++rule_counts_[static_cast<std::size_t>(*out.admin)];
  if (!(context() == before)) ++m.fiber_switches;
  sync_top_fiber();
  if (checked_point_) checkpoint();
  if (opts_.trace) {
    TraceEvent ev;
    ev.step = m.steps_total;
    ev.rule = out.shown_rule();
    ev.context = before;
    ev.subject = subject_;
    ev.segments = static_cast<std::uint32_t>(cfg_.stack.size());
    for (const Segment& s : cfg_.stack) ev.fibers += static_cast<std::uint32_t>(s.k.size());
    trace_.push_back(ev);
  }
  if (opts_.check_invariants) check_invariants();
}

namespace {

// Walks every value reachable from a configuration and the store. Shared
// environments and continuations are visited once.
class Reach {
 public:
  explicit Reach(std::function<void(const Kont&)> on_kont) : on_kont_(std::move(on_kont)) {}

  void value(const Value& v) {
    if (const auto* c = std::get_if<Closure>(&v.v)) env(c->env);
    else if (const auto* k = std::get_if<Kont>(&v.v)) {
      on_kont_(*k);
      cont(k->k);
    } else if (const auto* e = std::get_if<EffVal>(&v.v)) {
      cont(e->k);
    } else if (const auto* p = std::get_if<PrimRef>(&v.v)) {
      if (p->args)
        for (const Value& a : *p->args) value(a);
    }
  }
  void env(const Env& e) {
    if (e.empty() || !seen_.insert(e.identity()).second) return;
    for (const Binding& b : e) value(b.value);
  }
  void frames(const FrameList& fs) {
    for (const Frame& f : fs) {
      std::visit(
          [&](const auto& x) {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, ArgFrame> || std::is_same_v<T, Arith1Frame>) env(x.env);
            else if constexpr (std::is_same_v<T, FunFrame>) value(x.value);
            else if constexpr (std::is_same_v<T, TrapFrame>) env(x.handler.env);
          },
          f.f);
    }
  }
  void cont(const Continuation& k) {
    if (k.empty() || !seen_.insert(k.identity()).second) return;
    for (const Fiber& f : k) {
      frames(f.frames);
      env(f.handler.env);
    }
  }

 private:
  std::function<void(const Kont&)> on_kont_;
  std::unordered_set<const void*> seen_;
};

}  // namespace

void Machine::check_invariants() const {
  if (!stack_well_formed(cfg_.stack)) throw std::logic_error("stack is not an alternating C/OCaml chain");
  for (const Segment& s : cfg_.stack) {
    for (const Fiber& f : s.k) {
      if (f.id == kNoFiber) continue;
      if (!rt_.exists(f.id)) throw std::logic_error("fiber #" + std::to_string(f.id) + " has no metadata");
      if (rt_.meta(f.id).state != runtime::FiberState::Active)
        throw std::logic_error("fiber #" + std::to_string(f.id) + " on the stack is not active");
    }
  }
  // A continuation that can still be resumed must not hold a dead fiber.
  const bool oneshot = rt_.config().mode == runtime::Mode::OneShot;
  Reach reach([&](const Kont& k) {
    if (oneshot && rt_.registry().state(k.id) != runtime::ContState::Fresh) return;
    for (const Fiber& f : k.k)
      if (f.id != kNoFiber && rt_.meta(f.id).state == runtime::FiberState::Dead)
        throw std::logic_error("resumable continuation #" + std::to_string(k.id) + " holds dead fiber #" +
                               std::to_string(f.id));
  });
  if (const auto* v = std::get_if<Value>(&cfg_.term)) reach.value(*v);
  reach.env(cfg_.env);
  for (const Segment& s : cfg_.stack) {
    reach.frames(s.frames);
    reach.cont(s.k);
  }
  store_.for_each_value([&](const Value& v) { reach.value(v); });

  const auto& m = rt_.metrics();
  if (m.cache_hits + m.cache_misses != m.fiber_allocs) throw std::logic_error("cache hits and misses do not add up");
  if (m.fiber_allocs != m.fiber_frees + rt_.live_fibers()) throw std::logic_error("fiber allocations do not add up");
}

std::vector<Leak> Machine::leak_report() const {
  std::vector<Leak> out;
  for (ContId id : rt_.leak_report()) {
    auto it = fresh_konts_.find(id);
    out.push_back(Leak{id, it == fresh_konts_.end() ? Backtrace{} : continuation_backtrace(it->second)});
  }
  return out;
}

RunResult Machine::run() {
  RunResult r;
  for (;;) {
    if (steps() >= opts_.max_steps) {
      r.status = RunResult::Status::StepBudgetExceeded;
      break;
    }
    StepOutcome out = step();
    if (out.kind == StepOutcome::Kind::Done) {
      r.status = RunResult::Status::Done;
      r.value = std::move(out.value);
      break;
    }
    if (out.kind == StepOutcome::Kind::Fatal) {
      r.status = RunResult::Status::Fatal;
      r.fatal = std::move(out.fatal);
      break;
    }
  }
  r.metrics = metrics();
  if (opts_.trace) {
    r.trace = trace_;
    try {
      r.metrics.phases = phase_counters(trace_);
    } catch (const PhaseShapeError&) {
    }
  }
  r.output = store_.output();
  r.leaks = leak_report();
  r.live_fibers_at_exit = rt_.live_fibers();
  return r;
}

RunResult run(ExprPtr entry, const RunOptions& opts) { return Machine(std::move(entry), opts).run(); }

RunResult run(const SourceProgram& program, const RunOptions& opts) { return run(program.entry, opts); }

}  // namespace fibervm

#include "fibervm/syntax.hpp"

#include <sstream>
#include <stdexcept>

namespace fibervm {

const char* to_string(ArithOp op) {
  switch (op) {
    case ArithOp::Add: return "+";
    case ArithOp::Sub: return "-";
    case ArithOp::Mul: return "*";
    case ArithOp::Div: return "/";
  }
  return "?";
}

const ExnCase* HandlerSpec::find_exn(const Label& l) const {
  for (const auto& c : exn_cases)
    if (c.label == l) return &c;
  return nullptr;
}

const EffCase* HandlerSpec::find_eff(const Label& l) const {
  for (const auto& c : eff_cases)
    if (c.label == l) return &c;
  return nullptr;
}

bool HandlerSpec::is_identity() const {
  if (!exn_cases.empty() || !eff_cases.empty() || !value_case.body) return false;
  const auto* v = std::get_if<Var>(&value_case.body->node);
  return v != nullptr && v->name == value_case.param;
}

const HandlerPtr& identity_handler() {
  static const HandlerPtr h = mk_handler(ValueCase{"x", mk_var("x")});
  return h;
}

namespace {
ExprPtr wrap(decltype(Expr::node) n) { return std::make_shared<const Expr>(Expr{std::move(n)}); }
}  // namespace

ExprPtr mk_int(std::int64_t n) { return wrap(IntConst{n}); }
ExprPtr mk_var(std::string name) { return wrap(Var{std::move(name)}); }
ExprPtr mk_app(ExprPtr fn, ExprPtr arg) { return wrap(App{std::move(fn), std::move(arg)}); }
ExprPtr mk_lam(LamKind kind, std::string param, ExprPtr body) {
  return wrap(Lam{kind, std::move(param), std::move(body)});
}
ExprPtr mk_arith(ArithOp op, ExprPtr lhs, ExprPtr rhs) {
  return wrap(Arith{op, std::move(lhs), std::move(rhs)});
}
ExprPtr mk_raise(Label label, ExprPtr payload) { return wrap(Raise{std::move(label), std::move(payload)}); }
ExprPtr mk_perform(Label label, ExprPtr payload) {
  return wrap(Perform{std::move(label), std::move(payload)});
}
ExprPtr mk_handle(ExprPtr body, HandlerPtr handler) {
  return wrap(Handle{std::move(body), std::move(handler)});
}

void validate(const HandlerSpec& h) {
  if (!h.value_case.body) throw std::invalid_argument("handler is missing its value case");
  for (std::size_t i = 0; i < h.exn_cases.size(); ++i)
    for (std::size_t j = i + 1; j < h.exn_cases.size(); ++j)
      if (h.exn_cases[i].label == h.exn_cases[j].label)
        throw std::invalid_argument("duplicate exn case for " + h.exn_cases[i].label.name);
  for (std::size_t i = 0; i < h.eff_cases.size(); ++i)
    for (std::size_t j = i + 1; j < h.eff_cases.size(); ++j)
      if (h.eff_cases[i].label == h.eff_cases[j].label)
        throw std::invalid_argument("duplicate eff case for " + h.eff_cases[i].label.name);
}

HandlerPtr mk_handler(ValueCase value_case, std::vector<ExnCase> exn_cases, std::vector<EffCase> eff_cases) {
  auto h = std::make_shared<HandlerSpec>();
  h->value_case = std::move(value_case);
  h->exn_cases = std::move(exn_cases);
  h->eff_cases = std::move(eff_cases);
  validate(*h);
  return h;
}

bool equal(const ExprPtr& a, const ExprPtr& b) {
  if (a == b) return true;
  if (!a || !b) return false;
  return *a == *b;
}

bool operator==(const HandlerSpec& a, const HandlerSpec& b) {
  if (a.value_case.param != b.value_case.param || !equal(a.value_case.body, b.value_case.body)) return false;
  if (a.exn_cases.size() != b.exn_cases.size() || a.eff_cases.size() != b.eff_cases.size()) return false;
  for (std::size_t i = 0; i < a.exn_cases.size(); ++i) {
    const auto &x = a.exn_cases[i], &y = b.exn_cases[i];
    if (x.label != y.label || x.param != y.param || !equal(x.body, y.body)) return false;
  }
  for (std::size_t i = 0; i < a.eff_cases.size(); ++i) {
    const auto &x = a.eff_cases[i], &y = b.eff_cases[i];
    if (x.label != y.label || x.param != y.param || x.kont_param != y.kont_param || !equal(x.body, y.body))
      return false;
  }
  return true;
}

bool operator==(const Expr& a, const Expr& b) {
  if (a.node.index() != b.node.index()) return false;
  return std::visit(
      [&](const auto& x) -> bool {
        using T = std::decay_t<decltype(x)>;
        const auto& y = std::get<T>(b.node);
        if constexpr (std::is_same_v<T, IntConst>) {
          return x.value == y.value;
        } else if constexpr (std::is_same_v<T, Var>) {
          return x.name == y.name;
        } else if constexpr (std::is_same_v<T, App>) {
          return equal(x.fn, y.fn) && equal(x.arg, y.arg);
        } else if constexpr (std::is_same_v<T, Lam>) {
          return x.kind == y.kind && x.param == y.param && equal(x.body, y.body);
        } else if constexpr (std::is_same_v<T, Arith>) {
          return x.op == y.op && equal(x.lhs, y.lhs) && equal(x.rhs, y.rhs);
        } else if constexpr (std::is_same_v<T, Raise> || std::is_same_v<T, Perform>) {
          return x.label == y.label && equal(x.payload, y.payload);
        } else {
          return equal(x.body, y.body) && *x.handler == *y.handler;
        }
      },
      a.node);
}

namespace {

void print_to(std::ostream& os, const Expr& e);

void print_cases(std::ostream& os, const HandlerSpec& h) {
  os << " (val " << h.value_case.param << ' ';
  print_to(os, *h.value_case.body);
  os << ')';
  for (const auto& c : h.exn_cases) {
    os << " (exn " << c.label.name << ' ' << c.param << ' ';
    print_to(os, *c.body);
    os << ')';
  }
  for (const auto& c : h.eff_cases) {
    os << " (eff " << c.label.name << ' ' << c.param << ' ' << c.kont_param << ' ';
    print_to(os, *c.body);
    os << ')';
  }
}

void print_to(std::ostream& os, const Expr& e) {
  std::visit(
      [&](const auto& x) {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, IntConst>) {
          os << x.value;
        } else if constexpr (std::is_same_v<T, Var>) {
          os << x.name;
        } else if constexpr (std::is_same_v<T, App>) {
          os << '(';
          print_to(os, *x.fn);
          os << ' ';
          print_to(os, *x.arg);
          os << ')';
        } else if constexpr (std::is_same_v<T, Lam>) {
          os << (x.kind == LamKind::OCaml ? "(lambda (" : "(clambda (") << x.param << ") ";
          print_to(os, *x.body);
          os << ')';
        } else if constexpr (std::is_same_v<T, Arith>) {
          os << '(' << to_string(x.op) << ' ';
          print_to(os, *x.lhs);
          os << ' ';
          print_to(os, *x.rhs);
          os << ')';
        } else if constexpr (std::is_same_v<T, Raise>) {
          os << "(raise " << x.label.name << ' ';
          print_to(os, *x.payload);
          os << ')';
        } else if constexpr (std::is_same_v<T, Perform>) {
          os << "(perform " << x.label.name << ' ';
          print_to(os, *x.payload);
          os << ')';
        } else {
          os << "(handle ";
          print_to(os, *x.body);
          print_cases(os, *x.handler);
          os << ')';
        }
      },
      e.node);
}

}  // namespace

std::string print(const Expr& e) {
  std::ostringstream os;
  print_to(os, e);
  return os.str();
}

std::string print(const ExprPtr& e) { return e ? print(*e) : std::string("<null>"); }

std::string print(const HandlerSpec& h) {
  std::ostringstream os;
  os << '{';
  print_cases(os, h);
  os << " }";
  return os.str();
}

}  // namespace fibervm

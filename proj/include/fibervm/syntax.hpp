#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace fibervm {

/// Exception or effect label. Labels are undeclared identifiers compared by name.
struct Label {
  std::string name;

  Label() = default;
  explicit Label(std::string n) : name(std::move(n)) {}
  friend bool operator==(const Label&, const Label&) = default;
};

// Labels the runtime itself raises.
namespace labels {
inline const Label kUnhandled{"Unhandled"};
inline const Label kInvalidArgument{"Invalid_argument"};
inline const Label kDivisionByZero{"Division_by_zero"};
inline const Label kQueueEmpty{"Queue_Empty"};
inline const Label kStackEmpty{"Stack_Empty"};
inline const Label kAssertFailure{"Assert_failure"};
inline const Label kEndOfFile{"End_of_file"};
}  // namespace labels

enum class LamKind : std::uint8_t { OCaml, C };
enum class ArithOp : std::uint8_t { Add, Sub, Mul, Div };

const char* to_string(ArithOp op);

struct Expr;
struct HandlerSpec;
using ExprPtr = std::shared_ptr<const Expr>;
using HandlerPtr = std::shared_ptr<const HandlerSpec>;

struct IntConst {
  std::int64_t value;
};
struct Var {
  std::string name;
};
struct App {
  ExprPtr fn;
  ExprPtr arg;
};
struct Lam {
  LamKind kind;
  std::string param;
  ExprPtr body;
};
struct Arith {
  ArithOp op;
  ExprPtr lhs;
  ExprPtr rhs;
};
struct Raise {
  Label label;
  ExprPtr payload;
};
struct Perform {
  Label label;
  ExprPtr payload;
};
struct Handle {
  ExprPtr body;
  HandlerPtr handler;
};

struct Expr {
  std::variant<IntConst, Var, App, Lam, Arith, Raise, Perform, Handle> node;
};

struct ValueCase {
  std::string param;
  ExprPtr body;
};
struct ExnCase {
  Label label;
  std::string param;
  ExprPtr body;
};
struct EffCase {
  Label label;
  std::string param;
  std::string kont_param;
  ExprPtr body;
};

/// One value case, at most one exception case and one effect case per label.
struct HandlerSpec {
  ValueCase value_case;
  std::vector<ExnCase> exn_cases;
  std::vector<EffCase> eff_cases;

  [[nodiscard]] const ExnCase* find_exn(const Label& l) const;
  [[nodiscard]] const EffCase* find_eff(const Label& l) const;
  /// {val x -> x} with no other cases.
  [[nodiscard]] bool is_identity() const;
};

/// The handler of fibers created by Perform and Callback.
const HandlerPtr& identity_handler();

// Constructors.
ExprPtr mk_int(std::int64_t n);
ExprPtr mk_var(std::string name);
ExprPtr mk_app(ExprPtr fn, ExprPtr arg);
ExprPtr mk_lam(LamKind kind, std::string param, ExprPtr body);
ExprPtr mk_arith(ArithOp op, ExprPtr lhs, ExprPtr rhs);
ExprPtr mk_raise(Label label, ExprPtr payload);
ExprPtr mk_perform(Label label, ExprPtr payload);
ExprPtr mk_handle(ExprPtr body, HandlerPtr handler);

/// Throws std::invalid_argument when case-uniqueness is violated.
HandlerPtr mk_handler(ValueCase value_case, std::vector<ExnCase> exn_cases = {},
                      std::vector<EffCase> eff_cases = {});
void validate(const HandlerSpec& h);

bool operator==(const Expr& a, const Expr& b);
bool operator==(const HandlerSpec& a, const HandlerSpec& b);
/// Structural equality through pointers.
bool equal(const ExprPtr& a, const ExprPtr& b);

/// Prints the concrete syntax accepted by parse(); parse(print(e)) == e.
std::string print(const Expr& e);
std::string print(const ExprPtr& e);
std::string print(const HandlerSpec& h);

}  // namespace fibervm

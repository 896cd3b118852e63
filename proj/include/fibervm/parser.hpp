#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>

#include "fibervm/syntax.hpp"

namespace fibervm {

class ParseError : public std::runtime_error {
 public:
  ParseError(int line, int column, const std::string& msg);
  [[nodiscard]] int line() const noexcept { return line_; }
  [[nodiscard]] int column() const noexcept { return column_; }

 private:
  int line_;
  int column_;
};

/// Parses one expression in the parenthesized prefix syntax. The sugar forms
/// `let`, `continue` and `discontinue` are expanded; `(f a b ...)` is read as
/// left-nested application.
ExprPtr parse(std::string_view source);

/// continue k v  ==>  ((k (lambda (x) x)) v)
ExprPtr desugar_continue(ExprPtr k, ExprPtr v);
/// discontinue k l v  ==>  ((k (lambda (x) (raise l x))) v)
ExprPtr desugar_discontinue(ExprPtr k, Label label, ExprPtr v);
/// ((lambda (_) e) 0): the program starts on a C stack and enters OCaml code
/// through a callback, the way a native executable enters through startup code.
ExprPtr wrap_entry(ExprPtr e);

struct SourceProgram {
  std::filesystem::path path;
  std::string text;
  ExprPtr entry;  // wrapped
};

SourceProgram program_from_text(std::string text, std::filesystem::path path = "<string>");
/// Throws ParseError or std::runtime_error (I/O).
SourceProgram load_program(const std::filesystem::path& path);

/// Reserved words cannot be used as variable names or labels.
bool is_keyword(std::string_view word);

}  // namespace fibervm

#include "fibervm/parser.hpp"

#include <array>
#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>
#include <vector>

namespace fibervm {

ParseError::ParseError(int line, int column, const std::string& msg)
    : std::runtime_error(std::to_string(line) + ":" + std::to_string(column) + ": " + msg),
      line_(line),
      column_(column) {}

bool is_keyword(std::string_view word) {
  static constexpr std::array<std::string_view, 15> kWords = {
      "lambda", "clambda", "raise", "perform", "handle", "let", "continue", "discontinue",
      "val",    "exn",     "eff",   "+",       "-",      "*",   "/"};
  for (auto w : kWords)
    if (w == word) return true;
  return false;
}

namespace {

struct Token {
  enum Kind { LParen, RParen, Atom, End } kind;
  std::string text;
  int line;
  int column;
};

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) {}

  Token next() {
    skip_space();
    if (pos_ >= src_.size()) return {Token::End, "", line_, col_};
    const int line = line_, col = col_;
    const char c = src_[pos_];
    if (c == '(' || c == ')') {
      advance();
      return {c == '(' ? Token::LParen : Token::RParen, std::string(1, c), line, col};
    }
    std::string atom;
    while (pos_ < src_.size()) {
      const char d = src_[pos_];
      if (std::isspace(static_cast<unsigned char>(d)) || d == '(' || d == ')' || d == ';') break;
      atom.push_back(d);
      advance();
    }
    return {Token::Atom, std::move(atom), line, col};
  }

 private:
  void advance() {
    if (src_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }

  void skip_space() {
    while (pos_ < src_.size()) {
      const char c = src_[pos_];
      if (c == ';') {
        while (pos_ < src_.size() && src_[pos_] != '\n') advance();
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else {
        break;
      }
    }
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;
};

std::optional<std::int64_t> as_int(const std::string& s) {
  std::size_t i = (s.size() > 1 && s[0] == '-') ? 1 : 0;
  if (i >= s.size()) return std::nullopt;
  for (std::size_t j = i; j < s.size(); ++j)
    if (!std::isdigit(static_cast<unsigned char>(s[j]))) return std::nullopt;
  std::int64_t v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size()) return std::nullopt;
  return v;
}

class Parser {
 public:
  explicit Parser(std::string_view src) : lex_(src) { tok_ = lex_.next(); }

  ExprPtr parse_program() {
    ExprPtr e = expr();
    if (tok_.kind != Token::End) fail(tok_, "trailing input after expression");
    return e;
  }

 private:
  [[noreturn]] static void fail(const Token& t, const std::string& msg) { throw ParseError(t.line, t.column, msg); }

  Token take() {
    Token t = std::move(tok_);
    tok_ = lex_.next();
    return t;
  }

  void expect(Token::Kind k, const char* what) {
    if (tok_.kind != k) fail(tok_, std::string("expected ") + what);
    take();
  }

  std::string ident(const char* what) {
    if (tok_.kind != Token::Atom) fail(tok_, std::string("expected ") + what);
    if (is_keyword(tok_.text) || as_int(tok_.text)) fail(tok_, std::string("invalid ") + what + " '" + tok_.text + "'");
    return take().text;
  }

  ExprPtr expr() {
    if (tok_.kind == Token::Atom) {
      const Token t = take();
      if (auto n = as_int(t.text)) return mk_int(*n);
      if (is_keyword(t.text)) fail(t, "unexpected keyword '" + t.text + "'");
      return mk_var(t.text);
    }
    if (tok_.kind != Token::LParen) fail(tok_, tok_.kind == Token::End ? "unexpected end of input" : "unexpected ')'");
    const Token open = take();
    ExprPtr e;
    if (tok_.kind == Token::Atom && is_keyword(tok_.text)) {
      e = special(open);
    } else {
      e = expr();
      if (tok_.kind == Token::RParen) fail(tok_, "application needs an argument");
      while (tok_.kind != Token::RParen) e = mk_app(e, expr());
    }
    expect(Token::RParen, "')'");
    return e;
  }

  ExprPtr special(const Token& open) {
    const Token kw = take();
    const std::string& k = kw.text;
    if (k == "lambda" || k == "clambda") {
      expect(Token::LParen, "'(' before parameter");
      std::string param = ident("parameter");
      expect(Token::RParen, "')' after parameter");
      return mk_lam(k == "lambda" ? LamKind::OCaml : LamKind::C, std::move(param), expr());
    }
    if (k == "+" || k == "-" || k == "*" || k == "/") {
      const ArithOp op = k == "+" ? ArithOp::Add : k == "-" ? ArithOp::Sub : k == "*" ? ArithOp::Mul : ArithOp::Div;
      ExprPtr lhs = expr();
      return mk_arith(op, std::move(lhs), expr());
    }
    if (k == "raise" || k == "perform") {
      Label l(ident("label"));
      ExprPtr payload = expr();
      return k == "raise" ? mk_raise(std::move(l), std::move(payload)) : mk_perform(std::move(l), std::move(payload));
    }
    if (k == "let") {
      expect(Token::LParen, "'(' before binding");
      std::string x = ident("let-bound name");
      ExprPtr bound = expr();
      expect(Token::RParen, "')' after binding");
      ExprPtr body = expr();
      return mk_app(mk_lam(LamKind::OCaml, std::move(x), std::move(body)), std::move(bound));
    }
    if (k == "continue") {
      ExprPtr kont = expr();
      return desugar_continue(std::move(kont), expr());
    }
    if (k == "discontinue") {
      ExprPtr kont = expr();
      Label l(ident("label"));
      return desugar_discontinue(std::move(kont), std::move(l), expr());
    }
    if (k == "handle") return handle(open);
    fail(kw, "unexpected keyword '" + k + "'");
  }

  ExprPtr handle(const Token& open) {
    ExprPtr body = expr();
    std::optional<ValueCase> val;
    std::vector<ExnCase> exns;
    std::vector<EffCase> effs;
    while (tok_.kind == Token::LParen) {
      const Token case_open = take();
      if (tok_.kind != Token::Atom) fail(tok_, "expected handler case");
      const Token kind = take();
      if (kind.text == "val") {
        if (val) fail(kind, "duplicate value case");
        std::string x = ident("parameter");
        val = ValueCase{std::move(x), expr()};
      } else if (kind.text == "exn") {
        Label l(ident("label"));
        std::string x = ident("parameter");
        for (const auto& c : exns)
          if (c.label == l) fail(kind, "duplicate exn case for " + l.name);
        exns.push_back(ExnCase{std::move(l), std::move(x), expr()});
      } else if (kind.text == "eff") {
        Label l(ident("label"));
        std::string x = ident("parameter");
        std::string kp = ident("continuation parameter");
        for (const auto& c : effs)
          if (c.label == l) fail(kind, "duplicate eff case for " + l.name);
        effs.push_back(EffCase{std::move(l), std::move(x), std::move(kp), expr()});
      } else {
        fail(kind, "unknown handler case '" + kind.text + "'");
      }
      if (tok_.kind != Token::RParen) fail(tok_, "expected ')' after handler case");
      take();
      (void)case_open;
    }
    if (!val) fail(open, "handler is missing its value case");
    return mk_handle(std::move(body), mk_handler(std::move(*val), std::move(exns), std::move(effs)));
  }

  Lexer lex_;
  Token tok_;
};

}  // namespace

ExprPtr parse(std::string_view source) { return Parser(source).parse_program(); }

ExprPtr desugar_continue(ExprPtr k, ExprPtr v) {
  return mk_app(mk_app(std::move(k), mk_lam(LamKind::OCaml, "x", mk_var("x"))), std::move(v));
}

ExprPtr desugar_discontinue(ExprPtr k, Label label, ExprPtr v) {
  return mk_app(mk_app(std::move(k), mk_lam(LamKind::OCaml, "x", mk_raise(std::move(label), mk_var("x")))),
                std::move(v));
}

ExprPtr wrap_entry(ExprPtr e) { return mk_app(mk_lam(LamKind::OCaml, "_", std::move(e)), mk_int(0)); }

SourceProgram program_from_text(std::string text, std::filesystem::path path) {
  SourceProgram p;
  p.path = std::move(path);
  p.entry = wrap_entry(parse(text));
  p.text = std::move(text);
  return p;
}

SourceProgram load_program(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return program_from_text(ss.str(), path);
}

}  // namespace fibervm

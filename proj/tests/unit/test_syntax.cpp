#include <doctest.h>

#include <random>

#include "helpers.hpp"
#include "oracles.hpp"

using namespace th;

TEST_CASE("printing then reparsing gives the same tree") {
  std::mt19937_64 rng(7);
  for (int i = 0; i < 300; ++i) {
    const std::string src = oracle::random_program(rng);
    ExprPtr e = P(src);
    ExprPtr again = P(print(e));
    INFO(src);
    CHECK(equal(e, again));
    CHECK(print(again) == print(e));
  }
}

TEST_CASE("n-ary application nests to the left") {
  CHECK(equal(P("(f a b c)"), P("(((f a) b) c)")));
  CHECK(equal(P("(let (x 1) (+ x 2))"), P("((lambda (x) (+ x 2)) 1)")));
}

TEST_CASE("continue and discontinue expand to resumptions") {
  CHECK(equal(P("(continue k 3)"), desugar_continue(mk_var("k"), mk_int(3))));
  CHECK(equal(P("(continue k 3)"), P("((k (lambda (x) x)) 3)")));
  CHECK(equal(P("(discontinue k A 3)"), P("((k (lambda (x) (raise A x))) 3)")));
}

TEST_CASE("clambda builds a C lambda") {
  const auto& lam = std::get<Lam>(P("(clambda (x) x)")->node);
  CHECK(lam.kind == LamKind::C);
  CHECK(std::get<Lam>(P("(lambda (x) x)")->node).kind == LamKind::OCaml);
}

TEST_CASE("a handler keeps its cases in order") {
  HandlerPtr h = handler_of("(handle 0 (val v (+ v 1)) (exn A e 1) (exn B e 2) (eff E x k 3) (eff F x k 4))");
  REQUIRE(h->exn_cases.size() == 2);
  REQUIRE(h->eff_cases.size() == 2);
  CHECK(h->exn_cases[0].label == Label("A"));
  CHECK(h->eff_cases[1].label == Label("F"));
  CHECK_FALSE(h->is_identity());
  CHECK(handler_of("(handle 0 (val v v))")->is_identity());
}

TEST_CASE("comments and whitespace are ignored") {
  CHECK(equal(P("; note\n(+ 1 ; inner\n 2)"), P("(+ 1 2)")));
}

TEST_CASE("parse errors carry a position") {
  auto position = [](const std::string& src) {
    try {
      parse(src);
    } catch (const ParseError& e) {
      return std::pair{e.line(), e.column()};
    }
    return std::pair{0, 0};
  };
  CHECK(position("(+ 1 2").first == 1);
  CHECK(position("(+ 1\n  ))").first == 2);
  CHECK(position(")").first == 1);
  CHECK(position("(lambda (1) x)").first == 1);
  CHECK(position("(handle 0 (val v v) (eff E x))").first == 1);
  CHECK(position("(raise lambda 0)").first == 1);
}

TEST_CASE("reserved words are rejected as names") {
  CHECK(is_keyword("lambda"));
  CHECK(is_keyword("handle"));
  CHECK_FALSE(is_keyword("handler"));
  CHECK_THROWS_AS(parse("(lambda (let) 0)"), ParseError);
}

TEST_CASE("program entry is wrapped in a callback from C") {
  SourceProgram p = program_from_text("7");
  CHECK(equal(p.entry, P("((lambda (_) 7) 0)")));
  CHECK(equal(wrap_entry(mk_int(7)), p.entry));
}

TEST_CASE("negative literals") {
  CHECK(equal(P("-5"), mk_int(-5)));
  CHECK(equal(P("(- 0 5)"), mk_arith(ArithOp::Sub, mk_int(0), mk_int(5))));
}

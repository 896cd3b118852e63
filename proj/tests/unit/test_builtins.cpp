#include <doctest.h>

#include <set>

#include "helpers.hpp"

using namespace th;

namespace {

PrimResult call(const std::string& name, std::vector<Value> args, Store& s) {
  const Builtin* b = find_builtin(name);
  REQUIRE(b);
  return b->fn(args, s);
}

std::int64_t int_result(const PrimResult& r) {
  const auto* v = std::get_if<Value>(&r);
  REQUIRE(v);
  REQUIRE(v->is<IntVal>());
  return v->get<IntVal>()->n;
}

Label raised(const PrimResult& r) {
  const auto* l = std::get_if<Label>(&r);
  REQUIRE(l);
  return *l;
}

std::int64_t run_int(const std::string& src) {
  auto r = run_src(src);
  REQUIRE(r.status == RunResult::Status::Done);
  return r.value->get<IntVal>()->n;
}

}  // namespace

TEST_CASE("every builtin is registered once") {
  std::set<std::string> names;
  for (const auto& b : builtin_table()) CHECK(names.insert(b.name).second);
  CHECK(find_builtin("nope") == nullptr);
  CHECK(find_builtin("queue_new")->applications() == 1);
  CHECK(find_builtin("ifz")->applications() == 3);
}

TEST_CASE("cells") {
  Store s;
  Value r = std::get<Value>(call("ref_new", {I(4)}, s));
  CHECK(int_result(call("ref_get", {r}, s)) == 4);
  call("ref_set", {r, I(9)}, s);
  CHECK(int_result(call("ref_get", {r}, s)) == 9);
  CHECK(raised(call("ref_get", {I(1)}, s)) == labels::kInvalidArgument);
  CHECK(run_int("(let (r (ref_new 1)) (let (_ (ref_set r 5)) (ref_get r)))") == 5);
}

TEST_CASE("queues are FIFO and stacks LIFO") {
  Store s;
  Value q = std::get<Value>(call("queue_new", {I(0)}, s));
  Value st = std::get<Value>(call("stack_new", {I(0)}, s));
  for (int i = 1; i <= 3; ++i) {
    call("queue_push", {q, I(i)}, s);
    call("stack_push", {st, I(i)}, s);
  }
  CHECK(int_result(call("queue_length", {q}, s)) == 3);
  CHECK(int_result(call("queue_pop", {q}, s)) == 1);
  CHECK(int_result(call("stack_pop", {st}, s)) == 3);
  call("queue_pop", {q}, s);
  call("queue_pop", {q}, s);
  CHECK(raised(call("queue_pop", {q}, s)) == labels::kQueueEmpty);
  call("stack_pop", {st}, s);
  call("stack_pop", {st}, s);
  CHECK(raised(call("stack_pop", {st}, s)) == labels::kStackEmpty);
  CHECK(raised(call("queue_push", {I(0), I(1)}, s)) == labels::kInvalidArgument);
}

TEST_CASE("printing appends to the output log") {
  auto r = run_src("(let (_ (print_int 3)) (let (_ (print_tag 2 7)) (close_chan 4)))");
  REQUIRE(r.status == RunResult::Status::Done);
  CHECK(r.output == std::vector<std::string>{"3", "[2] 7", "closed 4"});
}

TEST_CASE("comparisons and selection") {
  CHECK(run_int("(eq 3 3)") == 1);
  CHECK(run_int("(eq 3 4)") == 0);
  CHECK(run_int("(lt 3 4)") == 1);
  CHECK(run_int("(lt 4 3)") == 0);
  CHECK(run_int("(ifz 0 10 20)") == 10);
  CHECK(run_int("(ifz 5 10 20)") == 20);
  CHECK(run_int("((ifz 0 (lambda (_) 1) (lambda (_) (raise A 0))) 0)") == 1);
}

TEST_CASE("assert_eq raises on mismatch") {
  CHECK(run_int("(assert_eq 2 2)") == 0);
  auto r = run_src("(assert_eq 2 3)");
  REQUIRE(r.status == RunResult::Status::Fatal);
  CHECK(r.fatal->label == labels::kAssertFailure);
}

TEST_CASE("channels yield three lines then End_of_file") {
  Store s;
  CHECK(int_result(call("chan_read", {I(2)}, s)) == 201);
  CHECK(int_result(call("chan_read", {I(2)}, s)) == 202);
  CHECK(int_result(call("chan_read", {I(1)}, s)) == 101);
  CHECK(int_result(call("chan_read", {I(2)}, s)) == 203);
  CHECK(raised(call("chan_read", {I(2)}, s)) == labels::kEndOfFile);
}

TEST_CASE("do_reads completes up to io_batch pending reads") {
  Store s;
  Value q = std::get<Value>(call("queue_new", {I(0)}, s));
  for (int i = 0; i < 3; ++i) call("queue_push", {q, I(i)}, s);
  CHECK(int_result(call("do_reads", {q}, s)) == 1);
  s.io_batch = 2;
  CHECK(int_result(call("do_reads", {q}, s)) == 2);
  s.io_batch = 0;
  CHECK(int_result(call("do_reads", {q}, s)) == 3);
  s.io_batch = 10;
  CHECK(int_result(call("do_reads", {q}, s)) == 3);
}

TEST_CASE("builtins can be partially applied and passed around") {
  CHECK(run_int("(let (inc (lt 0)) (+ (inc 5) (inc -5)))") == 1);
  CHECK(run_int("(let (twice (lambda (f) (lambda (x) (f (f x))))) ((twice (ifz 1 0)) 7))") == 7);
}

TEST_CASE("a builtin error can be handled") {
  CHECK(run_int("(handle (ref_get 0) (val x x) (exn Invalid_argument e 5))") == 5);
  CHECK(run_int("(handle (stack_pop (stack_new 0)) (val x x) (exn Stack_Empty e 6))") == 6);
}

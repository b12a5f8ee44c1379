#include <doctest.h>

#include <limits>

#include "sbstlab/errors.hpp"
#include "sbstlab/minilang/interp.hpp"
#include "sbstlab/minilang/parser.hpp"
#include "sbstlab/minilang/printer.hpp"

using namespace sbstlab;
using namespace sbstlab::minilang;

namespace {

const char* kAbs = "fn abs(x: int) { if (x < 0) { return (0 - x); } return x; }";

// Shape of the worked CDG example: three nested predicates, six branch
// outcomes, four distinct leaves.
const char* kNested = R"(fn classify(x: int, y: int) {
  if (x < 10) {
    if (y < 5) {
      if (x + y < 8) {
        return 1;
      } else {
        return 2;
      }
    } else {
      return 3;
    }
  } else {
    return 4;
  }
}
)";

ExecOutcome run(const Program& p, int entry, std::vector<Value> args, Limits limits = {}) {
    return execute(p, entry, args, limits);
}

} // namespace

TEST_CASE("parse a single function with one predicate") {
    const Program p = parse_program(kAbs);
    CHECK(p.function_count() == 1);
    CHECK(p.functions[0].name == "abs");
    CHECK(p.functions[0].predicates.size() == 1);
    CHECK(p.functions[0].params.size() == 1);
}

TEST_CASE("unknown callee is rejected") {
    try {
        parse_program("fn f() { return g(); }");
        FAIL("expected UnknownCallee");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::UnknownCallee);
    }
}

TEST_CASE("empty and malformed sources") {
    CHECK_THROWS_AS(parse_program(""), Error);
    CHECK_THROWS_AS(parse_program("   // just a comment\n"), Error);
    CHECK_THROWS_AS(parse_program("fn f( { }"), SyntaxError);
    CHECK_THROWS_AS(parse_program("fn f() { let x = ; }"), SyntaxError);
    CHECK_THROWS_AS(parse_program("fn f() { y = 1; }"), SyntaxError);           // undeclared
    CHECK_THROWS_AS(parse_program("fn f() { return v0; let v0 = 1; }"), SyntaxError);
    CHECK_THROWS_AS(parse_program("fn f(a: int, a: int) { return a; }"), SyntaxError);
    CHECK_THROWS_AS(parse_program("fn f() { return 1; } fn f() { return 2; }"), SyntaxError);
}

TEST_CASE("syntax errors carry positions") {
    try {
        parse_program("fn f() {\n  let x = @;\n}");
        FAIL("expected SyntaxError");
    } catch (const SyntaxError& e) {
        CHECK(e.line() == 2);
        CHECK(e.column() > 1);
    }
}

TEST_CASE("nested program has three predicates and deterministic node ids") {
    const Program p = parse_program(kNested);
    CHECK(p.functions[0].predicates.size() == 3);
    const Program again = parse_program(kNested);
    CHECK(structurally_equal(p, again));
}

TEST_CASE("print/parse roundtrip is structurally stable") {
    for (const char* src : {kAbs, kNested}) {
        const Program once = parse_program(src);
        const std::string printed = print_program(once);
        const Program twice = parse_program(printed);
        CHECK(structurally_equal(once, twice));
        CHECK(print_program(twice) == printed); // canonical form is a fixed point
    }
}

TEST_CASE("abs executes both branches") {
    const Program p = parse_program(kAbs);
    const auto neg = run(p, 0, {Value::of_int(-3)});
    REQUIRE(neg.returned());
    CHECK(neg.value == 3);
    REQUIRE(neg.trace.predicate_events.size() == 1);
    CHECK(neg.trace.predicate_events[0].outcome == true);
    CHECK(neg.trace.predicate_events[0].lhs == -3);
    CHECK(neg.trace.predicate_events[0].rhs == std::optional<std::int64_t>(0));

    const auto pos = run(p, 0, {Value::of_int(5)});
    REQUIRE(pos.returned());
    CHECK(pos.value == 5);
    CHECK(pos.trace.predicate_events[0].outcome == false);
}

TEST_CASE("division by zero traps") {
    const Program p = parse_program("fn d(a: int, b: int) { return a / b; }");
    const auto out = run(p, 0, {Value::of_int(1), Value::of_int(0)});
    REQUIRE(out.status == ExecOutcome::Status::Trapped);
    CHECK(out.trap == TrapKind::DivZero);
    const auto ok = run(p, 0, {Value::of_int(7), Value::of_int(2)});
    CHECK(ok.value == 3);
}

TEST_CASE("modulo by zero traps and wrapping edge cases hold") {
    const Program p = parse_program("fn m(a: int, b: int) { return a % b; }");
    CHECK(run(p, 0, {Value::of_int(5), Value::of_int(0)}).trap == TrapKind::DivZero);
    CHECK(run(p, 0, {Value::of_int(7), Value::of_int(3)}).value == 1);
}

TEST_CASE("infinite loop hits the step limit") {
    const Program p = parse_program("fn loop() { while (true) { } return 0; }");
    Limits limits;
    limits.max_steps = 100;
    const auto out = run(p, 0, {}, limits);
    REQUIRE(out.status == ExecOutcome::Status::Trapped);
    CHECK(out.trap == TrapKind::StepLimit);
}

TEST_CASE("unbounded recursion traps") {
    const Program p = parse_program("fn r(n: int) { return r(n + 1); }");
    Limits limits;
    limits.max_steps = 1000000;
    limits.max_call_depth = 16;
    const auto out = run(p, 0, {Value::of_int(0)}, limits);
    REQUIRE(out.status == ExecOutcome::Status::Trapped);
    CHECK(out.trap == TrapKind::RecursionLimit);
}

TEST_CASE("argument validation") {
    const Program p = parse_program("fn f(a: int, b: bool) { if (b) { return a; } return 0; }");
    CHECK_THROWS_AS(run(p, 0, {Value::of_int(1)}), Error);
    CHECK_THROWS_AS(run(p, 0, {Value::of_bool(true), Value::of_bool(true)}), Error);
    try {
        run(p, 0, {Value::of_int(1)});
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::ArityMismatch);
    }
    try {
        run(p, 0, {Value::of_bool(true), Value::of_bool(true)});
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::TypeMismatch);
    }
    CHECK(run(p, 0, {Value::of_int(9), Value::of_bool(true)}).value == 9);
}

TEST_CASE("outputs are observable in order") {
    const Program p = parse_program(
        "fn f(n: int) { output(n); output(n * 2); return n + 1; }");
    const auto out = run(p, 0, {Value::of_int(4)});
    CHECK(out.outputs == std::vector<std::int64_t>{4, 8});
    CHECK(out.value == 5);
}

TEST_CASE("execution is deterministic") {
    const Program p = parse_program(kNested);
    const auto a = run(p, 0, {Value::of_int(3), Value::of_int(2)});
    const auto b = run(p, 0, {Value::of_int(3), Value::of_int(2)});
    CHECK(a.same_observable(b));
    CHECK(a.trace.predicate_events.size() == b.trace.predicate_events.size());
    CHECK(a.trace.entered_functions == b.trace.entered_functions);
}

TEST_CASE("calls enter functions transitively and record entries") {
    const Program p = parse_program(
        "fn id(x: int) { return x; }\n"
        "fn f(y: int) { return id(y) + 1; }");
    const auto out = run(p, 1, {Value::of_int(10)});
    CHECK(out.value == 11);
    CHECK(out.trace.entered_functions == std::vector<int>{0, 1});
    CHECK(out.trace.entered(0));
    CHECK(out.trace.entered(1));
}

TEST_CASE("while loops evaluate the predicate once per iteration") {
    const Program p = parse_program(
        "fn f() { let i = 0; while (i < 3) { i = i + 1; } return i; }");
    const auto out = run(p, 0, {});
    CHECK(out.value == 3);
    // 3 true evaluations + 1 false exit evaluation
    CHECK(out.trace.predicate_events.size() == 4);
}

TEST_CASE("list_functions reports ids in declaration order") {
    const Program p = parse_program(
        "fn a() { return 1; }\nfn b(x: int, f: bool) { return x; }");
    const auto fns = list_functions(p);
    REQUIRE(fns.size() == 2);
    CHECK(fns[0].id == 0);
    CHECK(fns[0].name == "a");
    CHECK(fns[0].arity == 0);
    CHECK(fns[1].id == 1);
    CHECK(fns[1].arity == 2);
    CHECK(fns[1].param_types == std::vector<Type>{Type::Int, Type::Bool});
}

TEST_CASE("wrapping arithmetic semantics") {
    const Program p = parse_program("fn f(a: int, b: int) { return a + b; }");
    const auto out =
        run(p, 0, {Value::of_int(9223372036854775807LL), Value::of_int(1)});
    REQUIRE(out.returned());
    CHECK(out.value == std::numeric_limits<std::int64_t>::min());
}

TEST_CASE("compound conditions short-circuit") {
    const Program p = parse_program(
        "fn f(a: int, b: int) { if (a > 0 and 10 / b > 1) { return 1; } return 0; }");
    // a <= 0 short-circuits: the division never runs, no trap.
    const auto out = run(p, 0, {Value::of_int(-1), Value::of_int(0)});
    REQUIRE(out.returned());
    CHECK(out.value == 0);
    // a > 0 forces the right operand: division by zero traps.
    const auto trap = run(p, 0, {Value::of_int(1), Value::of_int(0)});
    CHECK(trap.status == ExecOutcome::Status::Trapped);
}

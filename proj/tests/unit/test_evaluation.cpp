#include <doctest.h>

#include "sbstlab/evaluation/evaluation.hpp"
#include "sbstlab/minilang/parser.hpp"

using namespace sbstlab;
using namespace sbstlab::evaluation;
using minilang::parse_program;
using minilang::Value;

namespace {

faults::FaultedPair off_by_one_pair() {
    faults::FaultedPair pair;
    pair.fixed = parse_program(
        "fn f(x: int) { if (x < 0) { output(1); } else { output(2); } return 0; }");
    pair.buggy = parse_program(
        "fn f(x: int) { if (x <= 0) { output(1); } else { output(2); } return 0; }");
    pair.ground_truth = {1};
    return pair;
}

} // namespace

TEST_CASE("identical versions never detect") {
    faults::FaultedPair identity;
    identity.fixed = parse_program("fn f(x: int) { return x * 2; }");
    identity.buggy = identity.fixed;
    identity.ground_truth = {0};
    for (int x : {-5, 0, 3, 77}) {
        const auto v = test_detects(identity, {0, {Value::of_int(x)}, search::Origin::Random});
        CHECK(!v.detects);
        CHECK(!v.invalid);
    }
}

TEST_CASE("the distinguishing input detects; others do not") {
    const auto pair = off_by_one_pair();
    CHECK(test_detects(pair, {0, {Value::of_int(0)}, search::Origin::Random}).detects);
    CHECK(!test_detects(pair, {0, {Value::of_int(-1)}, search::Origin::Random}).detects);
    CHECK(!test_detects(pair, {0, {Value::of_int(1)}, search::Origin::Random}).detects);
}

TEST_CASE("tests that avoid the mutated function never detect") {
    faults::FaultedPair pair;
    pair.fixed = parse_program(
        "fn ok(x: int) { return x; }\nfn bad(y: int) { return y + 1; }");
    pair.buggy = parse_program(
        "fn ok(x: int) { return x; }\nfn bad(y: int) { return y + 2; }");
    pair.ground_truth = {0, 1};
    CHECK(!test_detects(pair, {0, {Value::of_int(5)}, search::Origin::Random}).detects);
    CHECK(test_detects(pair, {1, {Value::of_int(5)}, search::Origin::Random}).detects);
}

TEST_CASE("invalid tests are logged and non-detecting") {
    const auto pair = off_by_one_pair();
    const auto v = test_detects(pair, {0, {}, search::Origin::Random}); // arity 0 != 1
    CHECK(!v.detects);
    CHECK(v.invalid);
}

TEST_CASE("suite verdicts aggregate with a first-witness index") {
    const auto pair = off_by_one_pair();
    std::vector<search::TestCase> suite = {
        {0, {Value::of_int(5)}, search::Origin::Random},
        {0, {Value::of_int(0)}, search::Origin::Random},
        {0, {Value::of_int(0)}, search::Origin::Random},
        {0, {Value::of_int(-2)}, search::Origin::Random},
    };
    const auto verdict = suite_detects(pair, suite);
    CHECK(verdict.detected);
    CHECK(verdict.first_detecting == 1);
    CHECK(verdict.per_test == std::vector<std::uint8_t>{0, 1, 1, 0});
    CHECK(verdict.reason == "detected");
    REQUIRE(verdict.witness_buggy.has_value());
    REQUIRE(verdict.witness_fixed.has_value());
    CHECK(!verdict.witness_buggy->same_observable(*verdict.witness_fixed));

    // Determinism across replays.
    const auto again = suite_detects(pair, suite);
    CHECK(again.detected == verdict.detected);
    CHECK(again.first_detecting == verdict.first_detecting);
    CHECK(again.per_test == verdict.per_test);
}

TEST_CASE("empty suite does not detect") {
    const auto pair = off_by_one_pair();
    const auto verdict = suite_detects(pair, {});
    CHECK(!verdict.detected);
    CHECK(verdict.first_detecting == -1);
    CHECK(verdict.reason == "empty_suite");
}

TEST_CASE("trap kind differences are observable") {
    faults::FaultedPair pair;
    pair.fixed = parse_program("fn f(x: int) { return 10 / (x + 1); }");
    pair.buggy = parse_program("fn f(x: int) { return 10 / (x - 1); }");
    pair.ground_truth = {1};
    // x = 1: fixed returns 5, buggy traps div_zero.
    CHECK(test_detects(pair, {0, {Value::of_int(1)}, search::Origin::Random}).detects);
    // x = -1: fixed traps, buggy returns -5.
    CHECK(test_detects(pair, {0, {Value::of_int(-1)}, search::Origin::Random}).detects);
    // x = 3: 10/4 == 10/2? 2 != 5 -> detects.
    CHECK(test_detects(pair, {0, {Value::of_int(3)}, search::Origin::Random}).detects);
    // x = 0: 10/1 = 10 vs 10/-1 = -10 -> detects.
    CHECK(test_detects(pair, {0, {Value::of_int(0)}, search::Origin::Random}).detects);
}

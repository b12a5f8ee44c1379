#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <set>

#include "sbstlab/errors.hpp"
#include "sbstlab/faults/corpus.hpp"
#include "sbstlab/faults/generate.hpp"
#include "sbstlab/faults/mutate.hpp"
#include "sbstlab/minilang/parser.hpp"
#include "sbstlab/minilang/printer.hpp"

using namespace sbstlab;
using namespace sbstlab::faults;
using minilang::parse_program;
using minilang::Program;

namespace {

const char* kAbs = "fn abs(x: int) { if (x < 0) { return 0 - x; } return x; }";

const char* kThree = R"(fn a(x: int) { return x + 1; }
fn b(x: int) { return x + 2; }
fn c(x: int) { return x + 3; }
)";

} // namespace

TEST_CASE("ror on abs flags exactly the one function") {
    Rng rng(1);
    const Program fixed = parse_program(kAbs);
    const auto pair = inject(fixed, {MutOp::Ror, 1}, rng);
    CHECK(pair.ground_truth == std::vector<std::uint8_t>{1});
    REQUIRE(pair.sites.size() == 1);
    CHECK(pair.sites[0].function == 0);
    CHECK(pair.sites[0].op == MutOp::Ror);
    // The comparison operator actually changed.
    CHECK(!minilang::structurally_equal(pair.fixed, pair.buggy));
    CHECK(minilang::print_program(pair.fixed) != minilang::print_program(pair.buggy));
}

TEST_CASE("constant perturbation marks two of three functions") {
    Rng rng(5);
    const Program fixed = parse_program(kThree);
    const auto pair = inject(fixed, {MutOp::ConstPerturb, 2}, rng);
    int labelled = 0;
    for (auto b : pair.ground_truth) labelled += b != 0;
    CHECK(labelled == 2);
    CHECK(pair.sites.size() == 2);
    std::set<int> fns;
    for (const auto& s : pair.sites) fns.insert(s.function);
    CHECK(fns.size() == 2);
}

TEST_CASE("no compatible site") {
    Rng rng(2);
    const Program fixed = parse_program("fn f(x: int) { return x; }"); // no relational ops
    CHECK_THROWS_AS(inject(fixed, {MutOp::Ror, 1}, rng), Error);
    try {
        inject(fixed, {MutOp::Ror, 1}, rng);
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::NoCompatibleSite);
    }
    // site_count larger than mutatable functions
    const Program three = parse_program(kThree);
    CHECK_THROWS_AS(inject(three, {MutOp::ConstPerturb, 4}, rng), Error);
}

namespace {

// Per-function source slices of the canonical whole-program print.
std::vector<std::string> function_slices(const Program& p) {
    const std::string text = minilang::print_program(p);
    std::vector<std::string> out;
    std::size_t pos = 0;
    while (true) {
        const std::size_t next = text.find("\nfn ", pos);
        if (next == std::string::npos) {
            out.push_back(text.substr(pos));
            break;
        }
        out.push_back(text.substr(pos, next - pos));
        pos = next + 1;
    }
    return out;
}

} // namespace

TEST_CASE("buggy program is re-parseable and differs only at mutated functions") {
    Rng rng(3);
    const Program fixed = parse_program(kThree);
    for (MutOp op : {MutOp::Aor, MutOp::ConstPerturb}) {
        const auto pair = inject(fixed, {op, 2}, rng);
        // Canonical print of the buggy program parses back to itself.
        const Program reparsed = parse_program(minilang::print_program(pair.buggy));
        CHECK(minilang::structurally_equal(pair.buggy, reparsed));
        // Single-delta: the textual diff touches mutated functions only.
        const auto before = function_slices(pair.fixed);
        const auto after = function_slices(pair.buggy);
        REQUIRE(before.size() == after.size());
        for (std::size_t i = 0; i < before.size(); ++i) {
            if (pair.ground_truth[i]) CHECK(before[i] != after[i]);
            else CHECK(before[i] == after[i]);
        }
    }
}

TEST_CASE("condition negation flips a branch") {
    Rng rng(4);
    const Program fixed = parse_program(kAbs);
    const auto pair = inject(fixed, {MutOp::CondNegate, 1}, rng);
    const auto fixed_out = minilang::execute(pair.fixed, 0, {minilang::Value::of_int(-3)});
    const auto buggy_out = minilang::execute(pair.buggy, 0, {minilang::Value::of_int(-3)});
    CHECK(fixed_out.value == 3);
    CHECK(buggy_out.value == -3);
}

TEST_CASE("identity pair is never detectable") {
    const Program fixed = parse_program(kAbs);
    FaultedPair identity;
    identity.fixed = fixed;
    identity.buggy = fixed;
    identity.ground_truth = {0};
    Rng rng(6);
    CHECK(!check_detectable(identity, 2000, rng));
}

TEST_CASE("relational off-by-one mutant is detectable; unreachable mutant is not") {
    // < replaced by <= differs only at x == 0, where outputs diverge.
    const Program fixed = parse_program(
        "fn f(x: int) { if (x < 0) { output(1); } else { output(2); } return 0; }");
    const Program lt_to_le = parse_program(
        "fn f(x: int) { if (x <= 0) { output(1); } else { output(2); } return 0; }");
    FaultedPair pair;
    pair.fixed = fixed;
    pair.buggy = lt_to_le;
    pair.ground_truth = {1};
    Rng rng(7);
    CHECK(check_detectable(pair, 10000, rng));

    // Exhaustive oracle over the sampling domain: only x = 0 differs.
    int differing = 0;
    for (int x = -100; x <= 100; ++x) {
        const auto a = minilang::execute(fixed, 0, {minilang::Value::of_int(x)});
        const auto b = minilang::execute(lt_to_le, 0, {minilang::Value::of_int(x)});
        if (!a.same_observable(b)) ++differing;
    }
    CHECK(differing == 1);

    // A mutation inside a false-constant branch can never fire.
    const Program guarded = parse_program(
        "fn f(x: int) { if (false) { output(1); } return x; }");
    const Program guarded_mut = parse_program(
        "fn f(x: int) { if (false) { output(2); } return x; }");
    FaultedPair dead;
    dead.fixed = guarded;
    dead.buggy = guarded_mut;
    dead.ground_truth = {1};
    Rng rng2(8);
    CHECK(!check_detectable(dead, 5000, rng2));
    for (int x = -100; x <= 100; ++x) {
        const auto a = minilang::execute(guarded, 0, {minilang::Value::of_int(x)});
        const auto b = minilang::execute(guarded_mut, 0, {minilang::Value::of_int(x)});
        CHECK(a.same_observable(b));
    }
}

TEST_CASE("random programs parse, print and execute deterministically") {
    Rng rng(10);
    for (int i = 0; i < 20; ++i) {
        const Program p = random_program(rng, 3, 1, 3, "gen.mlp");
        CHECK(p.function_count() == 3);
        const Program reparsed = parse_program(minilang::print_program(p));
        CHECK(minilang::structurally_equal(p, reparsed));
        // Execute every function on a few inputs; nothing may escape the
        // trap/return protocol.
        for (const auto& fn : p.functions) {
            std::vector<minilang::Value> args;
            for (const auto& param : fn.params)
                args.push_back(param.type == minilang::Type::Int ? minilang::Value::of_int(7)
                                                                 : minilang::Value::of_bool(true));
            const auto a = minilang::execute(p, fn.id, args);
            const auto b = minilang::execute(p, fn.id, args);
            CHECK(a.same_observable(b));
        }
    }
}

TEST_CASE("gen_corpus: empty, exact plan, determinism") {
    GenParams params;
    params.n_programs = 0;
    params.site_plan = {{1, 0}};
    CHECK(gen_corpus(params).empty());

    params.n_programs = 6;
    params.fns_min = 3;
    params.fns_max = 4;
    params.detect_samples = 2000;
    params.master_seed = 42;
    params.site_plan = {{1, 4}, {2, 2}};
    const auto records = gen_corpus(params);
    REQUIRE(records.size() == 6);
    int singles = 0, doubles = 0;
    for (const auto& rec : records) {
        int labelled = 0;
        for (auto b : rec.pair.ground_truth) labelled += b != 0;
        CHECK(labelled == rec.site_count);
        (rec.site_count == 1 ? singles : doubles) += 1;
        Rng check_rng(rec.seed + 999);
        CHECK(check_detectable(rec.pair, 2000, check_rng));
    }
    CHECK(singles == 4);
    CHECK(doubles == 2);

    // Same master seed: identical corpus (manifest-level comparison).
    const auto again = gen_corpus(params);
    REQUIRE(again.size() == records.size());
    for (std::size_t i = 0; i < records.size(); ++i) {
        CHECK(records[i].seed == again[i].seed);
        CHECK(minilang::print_program(records[i].pair.buggy) ==
              minilang::print_program(again[i].pair.buggy));
        CHECK(records[i].pair.ground_truth == again[i].pair.ground_truth);
    }
}

TEST_CASE("gen_corpus exhausts when the operator never applies") {
    GenParams params;
    params.n_programs = 1;
    params.depth_min = 0;
    params.depth_max = 0; // no branches generated
    params.max_attempts = 5;
    params.detect_samples = 100;
    params.operators = {MutOp::CondNegate}; // needs an if/while
    params.site_plan = {{1, 0}};
    CHECK_THROWS_AS(gen_corpus(params), Error);
    try {
        gen_corpus(params);
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::GenerationExhausted);
    }
}

TEST_CASE("corpus save/load roundtrip with validation") {
    GenParams params;
    params.n_programs = 3;
    params.detect_samples = 1000;
    params.master_seed = 7;
    params.site_plan = {{1, 0}};
    const auto records = gen_corpus(params);
    const auto dir = std::filesystem::temp_directory_path() / "sbstlab_test_corpus";
    std::filesystem::remove_all(dir);
    save_corpus(dir, records, params);

    const Corpus corpus = load_corpus(dir);
    REQUIRE(corpus.pairs.size() == 3);
    CHECK(corpus.master_seed == 7);
    for (std::size_t i = 0; i < corpus.pairs.size(); ++i) {
        CHECK(minilang::structurally_equal(corpus.pairs[i].fixed, records[i].pair.fixed));
        CHECK(minilang::structurally_equal(corpus.pairs[i].buggy, records[i].pair.buggy));
        CHECK(corpus.pairs[i].ground_truth == records[i].pair.ground_truth);
    }

    // Corrupt the truth file: load must reject the corpus.
    {
        std::ofstream out(dir / corpus.pairs[0].id / "truth.json", std::ios::binary);
        out << R"({"function_count": 1, "ground_truth": [0], "sites": [], "seed": 0, "site_count": 0})";
    }
    CHECK_THROWS_AS(load_corpus(dir), Error);
    std::filesystem::remove_all(dir);
}

#include <doctest.h>

#include <set>

#include "sbstlab/errors.hpp"
#include "sbstlab/fitness/fitness.hpp"
#include "sbstlab/minilang/parser.hpp"
#include "sbstlab/search/search.hpp"

using namespace sbstlab;
using namespace sbstlab::search;
using minilang::parse_program;
using minilang::Program;
using minilang::Value;

namespace {

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

const char* kTwoFns = R"(fn pos(x: int) { if (x > 0) { return 1; } return 0; }
fn neg(y: int) { if (y < 0) { return 1; } return 0; }
)";

} // namespace

TEST_CASE("filter_targets keeps only flagged owners") {
    const Program p = parse_program(kTwoFns);
    const auto pc = cdg::collect_targets(p);

    const auto all = filter_targets(pc, {1, 1});
    CHECK(all.size() == pc.table.size());

    const auto none = filter_targets(pc, {0, 0});
    CHECK(none.empty());

    const auto first = filter_targets(pc, {1, 0});
    CHECK(first.size() == 3); // entry + 2 branch outcomes
    for (auto u : first) CHECK(pc.table[u].owner == 0);
}

TEST_CASE("initial targets: entries and top-level branches only") {
    const Program p = parse_program(kNested);
    const auto pc = cdg::collect_targets(p);
    const auto ub = filter_targets(pc, {1});
    const auto init = initial_targets(pc, ub);
    // entry + the outermost predicate's two outcomes
    CHECK(init.size() == 3);
    std::set<cdg::TargetId> init_set(init.begin(), init.end());
    CHECK(init_set.count(pc.table.entry_of(0)) == 1);
    const auto& fn = p.functions[0];
    CHECK(init_set.count(pc.table.branch(fn.stmt(fn.predicates[0]).node_id, true)) == 1);
    CHECK(init_set.count(pc.table.branch(fn.stmt(fn.predicates[0]).node_id, false)) == 1);

    // Branchless function: entry only.
    const Program flat = parse_program("fn f(x: int) { return x; }");
    const auto flat_pc = cdg::collect_targets(flat);
    const auto flat_init = initial_targets(flat_pc, filter_targets(flat_pc, {1}));
    CHECK(flat_init.size() == 1);

    // Empty filtered set stays empty.
    CHECK(initial_targets(pc, {}).empty());
}

TEST_CASE("archive deduplicates structurally and keeps insertion order") {
    Archive archive;
    TestCase t1{0, {Value::of_int(1)}, Origin::Random};
    TestCase t2{0, {Value::of_int(2)}, Origin::Random};
    TestCase t1_again{0, {Value::of_int(1)}, Origin::Mutation};
    archive.insert(3, t1, 0);
    archive.insert(3, t2, 0);
    archive.insert(3, t1_again, 0);
    CHECK(archive.count(3) == 2);
    CHECK(archive.tests(3)[0].args[0].raw == 1);
    CHECK(archive.tests(3)[1].args[0].raw == 2);
    CHECK(archive.count(99) == 0);

    // A test covering two targets lands under both keys.
    archive.insert(4, t1, 0);
    CHECK(archive.count(4) == 1);
    CHECK(archive.suite().size() == 2); // union is deduplicated

    // Cap: FIFO eviction.
    Archive capped;
    for (int i = 0; i < 5; ++i) capped.insert(1, {0, {Value::of_int(i)}, Origin::Random}, 3);
    CHECK(capped.count(1) == 3);
    CHECK(capped.tests(1)[0].args[0].raw == 2);
}

TEST_CASE("switch-off drops the over-covered side (worked 30/20 example)") {
    const Program p = parse_program(kNested);
    const auto pc = cdg::collect_targets(p);
    const auto& fn = p.functions[0];
    const auto b1 = pc.table.branch(fn.stmt(fn.predicates[0]).node_id, true);
    const auto b2 = pc.table.branch(fn.stmt(fn.predicates[0]).node_id, false);

    Archive archive;
    for (int i = 0; i < 30; ++i) archive.insert(b1, {0, {Value::of_int(i), Value::of_int(0)}, Origin::Random}, 0);
    for (int i = 0; i < 20; ++i) archive.insert(b2, {0, {Value::of_int(100 + i), Value::of_int(0)}, Origin::Random}, 0);

    std::vector<std::uint8_t> base(pc.table.size(), 1);
    Rng rng(5);
    const auto active = detail::switch_off_targets(base, archive, pc, {1}, rng);
    // b1: 30 tests / 3 paths = 10; b2: 20 / 1 = 20 -> b2 switched off.
    CHECK(active[static_cast<std::size_t>(b1)] == 1);
    CHECK(active[static_cast<std::size_t>(b2)] == 0);
    // The entry target is never switched off.
    CHECK(active[static_cast<std::size_t>(pc.table.entry_of(0))] == 1);
}

TEST_CASE("switch-off keeps both sides on equal ratios and on an empty archive") {
    const Program p = parse_program(kNested);
    const auto pc = cdg::collect_targets(p);
    const auto& fn = p.functions[0];
    const auto b1 = pc.table.branch(fn.stmt(fn.predicates[0]).node_id, true);
    const auto b2 = pc.table.branch(fn.stmt(fn.predicates[0]).node_id, false);

    std::vector<std::uint8_t> base(pc.table.size(), 1);
    Rng rng(6);
    Archive empty;
    const auto active_empty = detail::switch_off_targets(base, empty, pc, {1}, rng);
    CHECK(active_empty == base);

    Archive balanced; // 30/3 == 10/1
    for (int i = 0; i < 30; ++i)
        balanced.insert(b1, {0, {Value::of_int(i), Value::of_int(0)}, Origin::Random}, 0);
    for (int i = 0; i < 10; ++i)
        balanced.insert(b2, {0, {Value::of_int(100 + i), Value::of_int(0)}, Origin::Random}, 0);
    const auto active = detail::switch_off_targets(base, balanced, pc, {1}, rng);
    CHECK(active[static_cast<std::size_t>(b1)] == 1);
    CHECK(active[static_cast<std::size_t>(b2)] == 1);
}

TEST_CASE("all-zero classification skips the run") {
    const Program p = parse_program(kNested);
    const auto pc = cdg::collect_targets(p);
    const auto result = run_search(p, pc, {0}, 1000, 1);
    CHECK(result.status == RunStatus::Skipped);
    CHECK(result.suite.empty());
    CHECK(result.stats.evaluations == 0);
}

TEST_CASE("search covers the nested program and archives multiple tests per target") {
    const Program p = parse_program(kNested);
    const auto pc = cdg::collect_targets(p);
    const auto result = run_search(p, pc, {1}, 5000, 42);
    REQUIRE(result.status == RunStatus::Completed);
    CHECK(result.stats.evaluations == 5000); // no early stop on full coverage
    CHECK(result.stats.covered_filtered == static_cast<int>(pc.table.size()));
    CHECK(result.suite.size() > 7);
    for (const auto& [target, n] : result.stats.archive_sizes) CHECK(n >= 1);

    // Archive soundness: replaying any suite test re-covers some target.
    for (const auto& t : result.suite) {
        const auto out = minilang::execute(p, t.entry, t.args);
        CHECK(out.returned());
    }
}

TEST_CASE("suite tests replay to cover their archive keys") {
    const Program p = parse_program(kTwoFns);
    const auto pc = cdg::collect_targets(p);
    const auto result = run_search(p, pc, {1, 1}, 3000, 9);
    REQUIRE(result.status == RunStatus::Completed);
    // Re-derive coverage for every archived test of every key.
    for (const auto& [target, n] : result.stats.archive_sizes) {
        CHECK(n > 0);
    }
    std::vector<cdg::TargetId> all;
    for (const auto& t : pc.table.targets()) all.push_back(t.id);
    std::vector<std::uint8_t> covered(pc.table.size(), 0);
    for (const auto& t : result.suite) {
        const auto eval = fitness::evaluate_test(p, t.entry, t.args, all, pc);
        for (std::size_t u = 0; u < covered.size(); ++u)
            covered[u] |= eval.covered_mask[u];
    }
    for (const auto& [target, n] : result.stats.archive_sizes)
        CHECK(covered[static_cast<std::size_t>(target)] == 1);
}

TEST_CASE("identical seeds give identical suites, different seeds differ") {
    const Program p = parse_program(kNested);
    const auto pc = cdg::collect_targets(p);
    const auto a = run_search(p, pc, {1}, 2000, 7);
    const auto b = run_search(p, pc, {1}, 2000, 7);
    REQUIRE(a.suite.size() == b.suite.size());
    for (std::size_t i = 0; i < a.suite.size(); ++i)
        CHECK(a.suite[i].same_genome(b.suite[i]));
    const auto c = run_search(p, pc, {1}, 2000, 8);
    bool all_same = a.suite.size() == c.suite.size();
    if (all_same)
        for (std::size_t i = 0; i < a.suite.size(); ++i)
            all_same = all_same && a.suite[i].same_genome(c.suite[i]);
    CHECK(!all_same);
}

TEST_CASE("evaluation budget is consumed exactly, even when not a population multiple") {
    const Program p = parse_program(kNested);
    const auto pc = cdg::collect_targets(p);
    SearchParams params;
    params.population = 50;
    const auto result = run_search(p, pc, {1}, 1234, 3, params);
    CHECK(result.stats.evaluations == 1234);
}

TEST_CASE("offspring with zero rates are clones") {
    const Program p = parse_program(kNested);
    const auto pc = cdg::collect_targets(p);
    SearchParams frozen;
    frozen.crossover_rate = 0.0;
    frozen.entry_reassign_rate = 0.0;
    frozen.gaussian_sigma = 0.0;
    const auto result = run_search(p, pc, {1}, 500, 11, frozen);
    REQUIRE(result.status == RunStatus::Completed);
    // With no variation every test is one of the 50 initial genomes.
    std::set<std::vector<std::int64_t>> genomes;
    for (const auto& t : result.suite) {
        std::vector<std::int64_t> key{t.entry};
        for (const auto& v : t.args) key.push_back(v.raw);
        genomes.insert(key);
    }
    CHECK(genomes.size() <= 50);
}

TEST_CASE("invalid budget is rejected") {
    const Program p = parse_program(kNested);
    const auto pc = cdg::collect_targets(p);
    CHECK_THROWS_AS(run_search(p, pc, {1}, 0, 1), Error);
}

TEST_CASE("target unlock: children enter only after their guard is covered") {
    const Program p = parse_program(kNested);
    const auto pc = cdg::collect_targets(p);
    const auto& fn = p.functions[0];
    const auto filtered = filter_targets(pc, {1});
    const auto b1 = pc.table.branch(fn.stmt(fn.predicates[0]).node_id, true);
    const auto b3 = pc.table.branch(fn.stmt(fn.predicates[1]).node_id, true);
    const auto b4 = pc.table.branch(fn.stmt(fn.predicates[1]).node_id, false);
    const auto b5 = pc.table.branch(fn.stmt(fn.predicates[2]).node_id, true);

    std::vector<std::uint8_t> base(pc.table.size(), 0);
    std::vector<std::uint8_t> covered(pc.table.size(), 0);
    for (auto u : initial_targets(pc, filtered)) base[static_cast<std::size_t>(u)] = 1;
    CHECK(base[static_cast<std::size_t>(b3)] == 0);

    // Nothing newly covered: no change.
    auto before = base;
    detail::update_base_targets(base, covered, filtered, pc);
    CHECK(base == before);

    // Covering the outer true branch admits both middle outcomes, but
    // not the innermost ones.
    covered[static_cast<std::size_t>(b1)] = 1;
    detail::update_base_targets(base, covered, filtered, pc);
    CHECK(base[static_cast<std::size_t>(b3)] == 1);
    CHECK(base[static_cast<std::size_t>(b4)] == 1);
    CHECK(base[static_cast<std::size_t>(b5)] == 0);

    // A child outside the filtered set stays out.
    const auto only_entry = std::vector<cdg::TargetId>{pc.table.entry_of(0)};
    std::vector<std::uint8_t> narrow(pc.table.size(), 0);
    detail::update_base_targets(narrow, covered, only_entry, pc);
    CHECK(narrow[static_cast<std::size_t>(b3)] == 0);
}

TEST_CASE("selection keeps per-objective minimizers and the size bound") {
    // Pool of five, two objectives with distinct minimizers.
    const std::vector<std::vector<double>> fitness = {
        {0.9, 0.8}, // dominated
        {0.1, 0.7}, // best on objective 0
        {0.8, 0.05}, // best on objective 1
        {0.5, 0.5},
        {0.9, 0.9}, // dominated by everything
    };
    std::vector<detail::PoolView> pool;
    for (const auto& f : fitness) pool.push_back({&f, 2});
    const std::vector<int> objectives = {0, 1};

    const auto sel = detail::select_population(pool, objectives, 3);
    REQUIRE(sel.picked.size() == 3);
    // Both minimizers survive with rank 0.
    CHECK(sel.picked[0] == 1);
    CHECK(sel.picked[1] == 2);
    CHECK(sel.rank[0] == 0);
    CHECK(sel.rank[1] == 0);

    // Single target: its unique minimizer is guaranteed in.
    const auto solo = detail::select_population(pool, {1}, 1);
    REQUIRE(solo.picked.size() == 1);
    CHECK(solo.picked[0] == 2);

    // All tests identical: any `want` survive, deterministically.
    const std::vector<double> same = {0.5, 0.5};
    std::vector<detail::PoolView> clones(6, {&same, 2});
    const auto flat = detail::select_population(clones, objectives, 4);
    CHECK(flat.picked.size() == 4);

    // Ties on fitness break toward fewer args.
    const std::vector<double> f1 = {0.3}, f2 = {0.3};
    std::vector<detail::PoolView> tie = {{&f1, 3}, {&f2, 1}};
    const auto picked = detail::select_population(tie, {0}, 1);
    CHECK(picked.picked[0] == 1);
}

TEST_CASE("subset chain: active within base within filtered") {
    const Program p = parse_program(kTwoFns);
    const auto pc = cdg::collect_targets(p);
    const auto filtered = filter_targets(pc, {1, 0});
    const auto init = initial_targets(pc, filtered);
    std::set<cdg::TargetId> filtered_set(filtered.begin(), filtered.end());
    for (auto u : init) CHECK(filtered_set.count(u) == 1);

    // switch_off only ever clears bits of the base mask.
    std::vector<std::uint8_t> base(pc.table.size(), 0);
    for (auto u : init) base[static_cast<std::size_t>(u)] = 1;
    Archive archive;
    const auto& fn = p.functions[0];
    const auto bt = pc.table.branch(fn.stmt(fn.predicates[0]).node_id, true);
    for (int i = 0; i < 9; ++i)
        archive.insert(bt, {0, {Value::of_int(i)}, Origin::Random}, 0);
    Rng rng(3);
    const auto active = detail::switch_off_targets(base, archive, pc, {1, 0}, rng);
    for (std::size_t u = 0; u < base.size(); ++u)
        if (!base[u]) CHECK(active[u] == 0);
}

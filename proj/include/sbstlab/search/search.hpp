#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <vector>

#include "sbstlab/cdg/cdg.hpp"
#include "sbstlab/fitness/fitness.hpp"
#include "sbstlab/minilang/interp.hpp"
#include "sbstlab/rng.hpp"

namespace sbstlab::search {

enum class Origin : std::uint8_t { Random, Crossover, Mutation };

/// The individual of the genetic search: a call with concrete arguments.
struct TestCase {
    int entry = -1;
    std::vector<minilang::Value> args;
    Origin origin = Origin::Random;

    bool same_genome(const TestCase& other) const {
        return entry == other.entry && args == other.args;
    }
};

struct SearchParams {
    int population = 50;
    double crossover_rate = 0.75;
    double entry_reassign_rate = 0.05;
    double gaussian_sigma = 10.0;
    int tournament = 2;
    int archive_cap = 0; // per-target; 0 = unlimited
    minilang::Limits limits;
};

/// Per-target sets of covering tests, deduplicated structurally; insertion
/// order is preserved. Keys are restricted to the filtered target set.
class Archive {
  public:
    void insert(cdg::TargetId target, const TestCase& test, int cap);
    std::size_t count(cdg::TargetId target) const;
    const std::vector<TestCase>& tests(cdg::TargetId target) const;
    std::vector<cdg::TargetId> keys() const;

    /// Union of all per-target sets, deduplicated, ordered by (first
    /// covering target id, insertion order).
    std::vector<TestCase> suite() const;

  private:
    struct Bucket {
        std::vector<TestCase> tests;
        std::set<std::vector<std::int64_t>> seen;
    };
    std::map<cdg::TargetId, Bucket> by_target_;
};

enum class RunStatus : std::uint8_t { Completed, Skipped };

struct RunStats {
    std::int64_t evaluations = 0;
    int iterations = 0;
    int covered_filtered = 0; // covered targets within U_B
    int filtered_targets = 0; // |U_B|
    std::map<cdg::TargetId, std::size_t> archive_sizes;
};

struct SearchResult {
    RunStatus status = RunStatus::Skipped;
    std::vector<TestCase> suite;
    RunStats stats;
};

/// U_B: targets owned by predicted-buggy functions.
std::vector<cdg::TargetId> filter_targets(const cdg::ProgramCdg& pc,
                                          const std::vector<std::uint8_t>& classification);

/// U*_0: members of U_B with no control-dependency parent (function
/// entries and top-level branch outcomes).
std::vector<cdg::TargetId> initial_targets(const cdg::ProgramCdg& pc,
                                           const std::vector<cdg::TargetId>& filtered);

/// The full search loop. Deterministic for a fixed seed; never stops early
/// on coverage; consumes exactly `budget` fitness evaluations unless the
/// classification flags nothing (status Skipped).
SearchResult run_search(const minilang::Program& program, const cdg::ProgramCdg& pc,
                        const std::vector<std::uint8_t>& classification, std::int64_t budget,
                        std::uint64_t seed, const SearchParams& params = {});

namespace detail {

/// Per predicate, drop the side whose tests-per-independent-path ratio is
/// strictly larger; equal ratios keep both. Exposed for direct testing.
std::vector<std::uint8_t> switch_off_targets(const std::vector<std::uint8_t>& base_mask,
                                             const Archive& archive, const cdg::ProgramCdg& pc,
                                             const std::vector<std::uint8_t>& fn_flagged,
                                             Rng& rng);

/// Admits every filtered target whose guarding branch outcome has been
/// covered; never removes. Targets without a parent are admitted
/// unconditionally.
void update_base_targets(std::vector<std::uint8_t>& base_mask,
                         const std::vector<std::uint8_t>& covered_any,
                         const std::vector<cdg::TargetId>& filtered, const cdg::ProgramCdg& pc);

/// One pool member as the selector sees it: fitness restricted to the
/// current objectives plus the tie-break key.
struct PoolView {
    const std::vector<double>* fitness = nullptr;
    std::size_t args = 0;
};

struct Selection {
    std::vector<int> picked;      // indices into the pool, selection order
    std::vector<int> rank;        // front index per picked entry
    std::vector<double> crowding; // crowding distance per picked entry
};

/// Preference sorting: the best test per objective forms rank 0, the rest
/// are non-dominated sorted; the last admitted front is truncated by
/// crowding distance. Ties break toward fewer args, then pool order.
Selection select_population(const std::vector<PoolView>& pool, const std::vector<int>& objectives,
                            int want);

} // namespace detail

} // namespace sbstlab::search

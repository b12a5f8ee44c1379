#pragma once

#include <cstdint>
#include <unordered_map>
#include <vector>

#include "sbstlab/cdg/cdg.hpp"
#include "sbstlab/minilang/interp.hpp"

namespace sbstlab::fitness {

/// Distance constant for near-miss outcomes; the full table lives in
/// docs/fitness.md.
inline constexpr double kK = 1.0;

/// Korel-style branch distance for a comparison `lhs op rhs` toward the
/// `desired` outcome. 0 iff the comparison already yields `desired`.
/// Throws Error(UnsupportedOperator) for non-comparison operators;
/// compound booleans are decomposed during instrumentation.
double branch_distance(minilang::BinOp op, std::int64_t lhs, std::int64_t rhs, bool desired);

/// d / (d + 1): monotone, 0 -> 0, bounded below 1.
double normalize(double d);

/// Per-execution index of the facts fitness needs: which targets were
/// covered, which functions entered, and the best (minimum) distance pair
/// observed at each evaluated predicate.
class TraceIndex {
  public:
    TraceIndex(const cdg::ProgramCdg& pc, const minilang::ExecTrace& trace);

    bool covered(cdg::TargetId u) const { return covered_[static_cast<std::size_t>(u)] != 0; }
    bool entered(int fn_id) const { return entered_[static_cast<std::size_t>(fn_id)] != 0; }

    /// Minimum recorded distance toward `outcome` at predicate `node`, or
    /// a negative value if the predicate was never evaluated.
    double best_distance(minilang::NodeId node, bool outcome) const;

    const std::vector<std::uint8_t>& covered_mask() const { return covered_; }

  private:
    std::vector<std::uint8_t> covered_;
    std::vector<std::uint8_t> entered_;
    std::unordered_map<minilang::NodeId, std::size_t> node_index_;
    std::vector<double> best_true_;
    std::vector<double> best_false_;
};

/// Approach level + normalized branch distance for one target:
///   covered                -> 0
///   entered, divergence at ancestor k -> k + normalize(distance at k)
///   function never entered -> depth(target) + 1
double target_fitness(const TraceIndex& index, cdg::TargetId target, const cdg::ProgramCdg& pc);

/// Convenience form matching the one-shot call shape: builds the index.
double target_fitness(const minilang::ExecTrace& trace, cdg::TargetId target,
                      const cdg::ProgramCdg& pc);

struct EvaluatedTest {
    minilang::ExecOutcome outcome;
    std::vector<double> fitness; // aligned with the `targets` argument
    std::vector<std::uint8_t> covered_mask; // by target id, full table
};

/// Executes one call and computes fitness for the requested targets.
/// Throws Error(InvalidTest) when the arguments do not fit the entry
/// function's signature.
EvaluatedTest evaluate_test(const minilang::Program& program, int entry,
                            const std::vector<minilang::Value>& args,
                            const std::vector<cdg::TargetId>& targets, const cdg::ProgramCdg& pc,
                            const minilang::Limits& limits = {});

} // namespace sbstlab::fitness

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "sbstlab/minilang/ast.hpp"
#include "sbstlab/minilang/interp.hpp"

namespace sbstlab::cdg {

using TargetId = std::int32_t;

enum class TargetKind : std::uint8_t { FunctionEntry, BranchOutcome };

struct CoverageTarget {
    TargetId id = -1;
    TargetKind kind{};
    int owner = -1;                 // function id
    minilang::NodeId node = -1;     // BranchOutcome: predicate statement node
    bool outcome = false;           // BranchOutcome
    std::string label;              // e.g. "entry:abs" or "branch:12:true"
};

/// Dense, program-wide target id space: per function, one FunctionEntry
/// target followed by (true, false) BranchOutcome pairs for each predicate
/// in pre-order.
class TargetTable {
  public:
    static TargetTable enumerate(const minilang::Program& program);

    const std::vector<CoverageTarget>& targets() const { return targets_; }
    std::size_t size() const { return targets_.size(); }
    const CoverageTarget& operator[](TargetId id) const {
        return targets_[static_cast<std::size_t>(id)];
    }

    TargetId entry_of(int fn_id) const { return entry_of_[static_cast<std::size_t>(fn_id)]; }
    TargetId branch(minilang::NodeId predicate_node, bool outcome) const;
    bool has_predicate(minilang::NodeId node) const { return branch_.count(node) > 0; }

    /// Target ids covered by a trace: FunctionEntry for every entered
    /// function plus BranchOutcome for every predicate event. Sorted.
    std::vector<TargetId> covered(const minilang::ExecTrace& trace) const;

    /// Same facts as a by-id mask (hot path).
    void covered_mask(const minilang::ExecTrace& trace, std::vector<std::uint8_t>& mask) const;

  private:
    std::vector<CoverageTarget> targets_;
    std::vector<TargetId> entry_of_;
    std::unordered_map<minilang::NodeId, std::pair<TargetId, TargetId>> branch_; // (true, false)
};

enum class EdgeLabel : std::uint8_t { True, False, Unconditional };

enum class NodeKind : std::uint8_t { Entry, Predicate, Region };

struct CdgNode {
    NodeKind kind{};
    minilang::NodeId ast_node = -1; // Predicate: if/while statement node id
    std::vector<int> out;           // edge indices
};

/// Per-function control dependency graph. Outcome edges carry the branch
/// targets in `phi`; unconditional edges are structural (entry or region
/// fan-out) and have empty phi.
struct CdgEdge {
    int id = -1;
    int from = -1;
    int head = -1; // node index, -1 for leaf edges
    EdgeLabel label{};
    std::vector<TargetId> phi;
};

struct Cdg {
    int fn = -1;
    std::vector<CdgNode> nodes;
    std::vector<CdgEdge> edges;
    int root = 0;
    // predicate statement node id -> (true edge, false edge)
    std::unordered_map<minilang::NodeId, std::pair<int, int>> outcome_edges;
};

/// Independent path counts per edge: 1 for leaf edges, otherwise the sum
/// over the outgoing edges of the edge's head node. Throws
/// Error(CyclicGraph) if the graph is not acyclic.
using PathCounts = std::vector<std::int64_t>;
PathCounts independent_paths(const Cdg& cdg);

Cdg build_cdg(const minilang::Program& program, int fn_id, const TargetTable& table);

/// GraphViz dump for inspection.
std::string to_dot(const Cdg& cdg, const minilang::Program& program);

/// Aggregated per-program structures consumed by the search.
struct ProgramCdg {
    TargetTable table;
    std::vector<Cdg> cdgs;               // by function id
    std::vector<PathCounts> path_counts; // by function id, by edge id
    std::vector<int> parent_edge;        // by target id; edge index in owner cdg, -1 = none
    std::vector<int> depth;              // by target id; # of control-dependency ancestors

    const Cdg& of(int fn_id) const { return cdgs[static_cast<std::size_t>(fn_id)]; }
    std::int64_t paths_of_edge(int fn_id, int edge) const {
        return path_counts[static_cast<std::size_t>(fn_id)][static_cast<std::size_t>(edge)];
    }
};

ProgramCdg collect_targets(const minilang::Program& program);

} // namespace sbstlab::cdg

#include "sbstlab/fitness/fitness.hpp"

#include <algorithm>

#include "sbstlab/errors.hpp"

namespace sbstlab::fitness {

using cdg::CoverageTarget;
using cdg::ProgramCdg;
using cdg::TargetId;
using cdg::TargetKind;
using minilang::BinOp;

double branch_distance(BinOp op, std::int64_t lhs, std::int64_t rhs, bool desired) {
    if (!minilang::is_relational(op))
        throw Error(ErrorCode::UnsupportedOperator,
                    std::string("branch distance over '") + std::string(minilang::binop_token(op)) +
                        "'");
    // Distances are heuristics; doubles keep the arithmetic total for the
    // whole int64 range.
    const double a = static_cast<double>(lhs);
    const double b = static_cast<double>(rhs);
    // desired == false is the distance toward the negated comparison.
    if (!desired) {
        switch (op) {
            case BinOp::Lt: op = BinOp::Ge; break;
            case BinOp::Le: op = BinOp::Gt; break;
            case BinOp::Gt: op = BinOp::Le; break;
            case BinOp::Ge: op = BinOp::Lt; break;
            case BinOp::Eq: op = BinOp::Ne; break;
            case BinOp::Ne: op = BinOp::Eq; break;
            default: break;
        }
    }
    switch (op) {
        case BinOp::Lt: return lhs < rhs ? 0.0 : a - b + kK;
        case BinOp::Le: return lhs <= rhs ? 0.0 : a - b;
        case BinOp::Gt: return lhs > rhs ? 0.0 : b - a + kK;
        case BinOp::Ge: return lhs >= rhs ? 0.0 : b - a;
        case BinOp::Eq: return lhs == rhs ? 0.0 : std::abs(a - b);
        case BinOp::Ne: return lhs != rhs ? 0.0 : kK;
        default: return kK;
    }
}

double normalize(double d) { return d / (d + 1.0); }

TraceIndex::TraceIndex(const ProgramCdg& pc, const minilang::ExecTrace& trace) {
    pc.table.covered_mask(trace, covered_);
    entered_.assign(pc.cdgs.size(), 0);
    for (int fn : trace.entered_functions) entered_[static_cast<std::size_t>(fn)] = 1;
    best_true_.clear();
    best_false_.clear();
    for (const auto& ev : trace.predicate_events) {
        auto it = node_index_.find(ev.node);
        std::size_t slot;
        if (it == node_index_.end()) {
            slot = best_true_.size();
            node_index_.emplace(ev.node, slot);
            best_true_.push_back(ev.dist_true);
            best_false_.push_back(ev.dist_false);
        } else {
            slot = it->second;
            best_true_[slot] = std::min(best_true_[slot], ev.dist_true);
            best_false_[slot] = std::min(best_false_[slot], ev.dist_false);
        }
    }
}

double TraceIndex::best_distance(minilang::NodeId node, bool outcome) const {
    auto it = node_index_.find(node);
    if (it == node_index_.end()) return -1.0;
    return outcome ? best_true_[it->second] : best_false_[it->second];
}

double target_fitness(const TraceIndex& index, TargetId target, const ProgramCdg& pc) {
    if (index.covered(target)) return 0.0;
    const CoverageTarget& t = pc.table[target];
    const int depth = pc.depth[static_cast<std::size_t>(target)];
    if (!index.entered(t.owner)) return static_cast<double>(depth) + 1.0;

    // An uncovered FunctionEntry of an entered function cannot happen;
    // treat defensively as maximal.
    if (t.kind == TargetKind::FunctionEntry) return 1.0;

    // Divergence at the target's own predicate.
    double d = index.best_distance(t.node, t.outcome);
    if (d >= 0.0) return normalize(d);

    // Walk the control-dependency chain upward until an evaluated
    // predicate is found; each skipped level adds one approach level.
    const cdg::Cdg& graph = pc.of(t.owner);
    int level = 1;
    int edge = pc.parent_edge[static_cast<std::size_t>(target)];
    while (edge >= 0) {
        const cdg::CdgEdge& e = graph.edges[static_cast<std::size_t>(edge)];
        const cdg::CdgNode& node = graph.nodes[static_cast<std::size_t>(e.from)];
        const bool required = e.label == cdg::EdgeLabel::True;
        d = index.best_distance(node.ast_node, required);
        if (d >= 0.0) return static_cast<double>(level) + normalize(d);
        ++level;
        const TargetId parent_target = pc.table.branch(node.ast_node, required);
        edge = pc.parent_edge[static_cast<std::size_t>(parent_target)];
    }
    // Function entered but no predicate on the chain ever evaluated
    // (e.g. cut short by an earlier return or trap). No divergence
    // distance exists; charge the full chain plus the K-step.
    return static_cast<double>(depth) + normalize(kK);
}

double target_fitness(const minilang::ExecTrace& trace, TargetId target, const ProgramCdg& pc) {
    return target_fitness(TraceIndex(pc, trace), target, pc);
}

EvaluatedTest evaluate_test(const minilang::Program& program, int entry,
                            const std::vector<minilang::Value>& args,
                            const std::vector<TargetId>& targets, const ProgramCdg& pc,
                            const minilang::Limits& limits) {
    EvaluatedTest out;
    try {
        out.outcome = minilang::execute(program, entry, args, limits);
    } catch (const Error& e) {
        if (e.code() == ErrorCode::ArityMismatch || e.code() == ErrorCode::TypeMismatch)
            throw Error(ErrorCode::InvalidTest, e.what());
        throw;
    }
    TraceIndex index(pc, out.outcome.trace);
    out.fitness.reserve(targets.size());
    for (TargetId u : targets) out.fitness.push_back(target_fitness(index, u, pc));
    out.covered_mask = index.covered_mask();
    return out;
}

} // namespace sbstlab::fitness

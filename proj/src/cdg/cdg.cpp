#include "sbstlab/cdg/cdg.hpp"

#include <algorithm>

#include "sbstlab/errors.hpp"

namespace sbstlab::cdg {

using minilang::Function;
using minilang::NodeId;
using minilang::Program;
using minilang::Stmt;
using minilang::StmtKind;
using minilang::StmtRef;

TargetTable TargetTable::enumerate(const Program& program) {
    TargetTable t;
    t.entry_of_.resize(program.functions.size(), -1);
    for (const auto& fn : program.functions) {
        CoverageTarget entry;
        entry.id = static_cast<TargetId>(t.targets_.size());
        entry.kind = TargetKind::FunctionEntry;
        entry.owner = fn.id;
        entry.label = "entry:" + fn.name;
        t.entry_of_[static_cast<std::size_t>(fn.id)] = entry.id;
        t.targets_.push_back(std::move(entry));
        for (StmtRef ref : fn.predicates) {
            const Stmt& st = fn.stmt(ref);
            std::pair<TargetId, TargetId> pair;
            for (bool outcome : {true, false}) {
                CoverageTarget bt;
                bt.id = static_cast<TargetId>(t.targets_.size());
                bt.kind = TargetKind::BranchOutcome;
                bt.owner = fn.id;
                bt.node = st.node_id;
                bt.outcome = outcome;
                bt.label = "branch:" + std::to_string(st.node_id) + (outcome ? ":true" : ":false");
                (outcome ? pair.first : pair.second) = bt.id;
                t.targets_.push_back(std::move(bt));
            }
            t.branch_.emplace(st.node_id, pair);
        }
    }
    return t;
}

TargetId TargetTable::branch(NodeId predicate_node, bool outcome) const {
    auto it = branch_.find(predicate_node);
    if (it == branch_.end())
        throw Error(ErrorCode::UnsupportedOperator,
                    "node " + std::to_string(predicate_node) + " is not a predicate");
    return outcome ? it->second.first : it->second.second;
}

std::vector<TargetId> TargetTable::covered(const minilang::ExecTrace& trace) const {
    std::vector<TargetId> out;
    for (int fn : trace.entered_functions) out.push_back(entry_of(fn));
    for (const auto& ev : trace.predicate_events) out.push_back(branch(ev.node, ev.outcome));
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

void TargetTable::covered_mask(const minilang::ExecTrace& trace,
                               std::vector<std::uint8_t>& mask) const {
    mask.assign(targets_.size(), 0);
    for (int fn : trace.entered_functions)
        mask[static_cast<std::size_t>(entry_of(fn))] = 1;
    for (const auto& ev : trace.predicate_events) {
        auto it = branch_.find(ev.node);
        if (it == branch_.end()) continue;
        mask[static_cast<std::size_t>(ev.outcome ? it->second.first : it->second.second)] = 1;
    }
}

namespace {

class Builder {
  public:
    Builder(const Program& program, int fn_id, const TargetTable& table)
        : fn_(program.functions[static_cast<std::size_t>(fn_id)]), table_(table) {
        cdg_.fn = fn_id;
    }

    Cdg build() {
        const int root = new_node(NodeKind::Entry, -1);
        cdg_.root = root;
        // Top-level predicates hang off the entry node through
        // unconditional edges; their branch targets have no
        // control-dependency parent.
        for (StmtRef ref : direct_predicates(fn_.body)) {
            const int e = new_edge(root, EdgeLabel::Unconditional);
            cdg_.edges[static_cast<std::size_t>(e)].head = build_predicate(ref);
        }
        return std::move(cdg_);
    }

  private:
    std::vector<StmtRef> direct_predicates(const std::vector<StmtRef>& block) const {
        std::vector<StmtRef> out;
        for (StmtRef ref : block) {
            const Stmt& st = fn_.stmt(ref);
            if (st.kind == StmtKind::If || st.kind == StmtKind::While) out.push_back(ref);
        }
        return out;
    }

    int new_node(NodeKind kind, NodeId ast_node) {
        cdg_.nodes.push_back(CdgNode{kind, ast_node, {}});
        return static_cast<int>(cdg_.nodes.size() - 1);
    }

    int new_edge(int from, EdgeLabel label) {
        const int id = static_cast<int>(cdg_.edges.size());
        CdgEdge e;
        e.id = id;
        e.from = from;
        e.label = label;
        cdg_.edges.push_back(std::move(e));
        cdg_.nodes[static_cast<std::size_t>(from)].out.push_back(id);
        return id;
    }

    int build_predicate(StmtRef ref) {
        const Stmt& st = fn_.stmt(ref);
        const int node = new_node(NodeKind::Predicate, st.node_id);
        const int et = new_edge(node, EdgeLabel::True);
        const int ef = new_edge(node, EdgeLabel::False);
        cdg_.edges[static_cast<std::size_t>(et)].phi.push_back(table_.branch(st.node_id, true));
        cdg_.edges[static_cast<std::size_t>(ef)].phi.push_back(table_.branch(st.node_id, false));
        cdg_.outcome_edges.emplace(st.node_id, std::make_pair(et, ef));
        // Nested predicates hang off the branch edge guarding them; the
        // while false-edge leads out of the loop and is always a leaf.
        cdg_.edges[static_cast<std::size_t>(et)].head = build_block(st.body);
        if (st.kind == StmtKind::If)
            cdg_.edges[static_cast<std::size_t>(ef)].head = build_block(st.orelse);
        return node;
    }

    /// Head node for an edge entering `block`: -1 when branchless, the
    /// predicate itself for a single nested predicate, or a region node
    /// fanning out to each of several sequential predicates.
    int build_block(const std::vector<StmtRef>& block) {
        const auto preds = direct_predicates(block);
        if (preds.empty()) return -1;
        if (preds.size() == 1) return build_predicate(preds[0]);
        const int region = new_node(NodeKind::Region, -1);
        for (StmtRef ref : preds) {
            const int e = new_edge(region, EdgeLabel::Unconditional);
            cdg_.edges[static_cast<std::size_t>(e)].head = build_predicate(ref);
        }
        return region;
    }

    const Function& fn_;
    const TargetTable& table_;
    Cdg cdg_;
};

} // namespace

Cdg build_cdg(const Program& program, int fn_id, const TargetTable& table) {
    return Builder(program, fn_id, table).build();
}

PathCounts independent_paths(const Cdg& cdg) {
    PathCounts counts(cdg.edges.size(), 0);
    std::vector<std::uint8_t> state(cdg.edges.size(), 0); // 0 new, 1 active, 2 done

    // Iterative post-order with an explicit stack; flags a back edge as a
    // cycle even though structured programs cannot produce one.
    std::vector<std::pair<int, bool>> stack;
    for (std::size_t e = 0; e < cdg.edges.size(); ++e) {
        if (state[e] == 2) continue;
        stack.emplace_back(static_cast<int>(e), false);
        while (!stack.empty()) {
            auto [edge, expanded] = stack.back();
            stack.pop_back();
            const auto idx = static_cast<std::size_t>(edge);
            const CdgEdge& ce = cdg.edges[idx];
            const bool leaf =
                ce.head < 0 || cdg.nodes[static_cast<std::size_t>(ce.head)].out.empty();
            if (expanded) {
                std::int64_t total = 0;
                for (int child : cdg.nodes[static_cast<std::size_t>(ce.head)].out)
                    total += counts[static_cast<std::size_t>(child)];
                counts[idx] = total;
                state[idx] = 2;
                continue;
            }
            if (state[idx] == 2) continue;
            if (state[idx] == 1) throw Error(ErrorCode::CyclicGraph, "cycle through edge");
            if (leaf) {
                counts[idx] = 1;
                state[idx] = 2;
                continue;
            }
            state[idx] = 1;
            stack.emplace_back(edge, true);
            for (int child : cdg.nodes[static_cast<std::size_t>(ce.head)].out) {
                const auto c = static_cast<std::size_t>(child);
                if (state[c] == 1) throw Error(ErrorCode::CyclicGraph, "cycle through edge");
                if (state[c] == 0) stack.emplace_back(child, false);
            }
        }
    }
    return counts;
}

std::string to_dot(const Cdg& cdg, const Program& program) {
    const Function& fn = program.functions[static_cast<std::size_t>(cdg.fn)];
    std::string out = "digraph cdg_" + fn.name + " {\n";
    for (std::size_t n = 0; n < cdg.nodes.size(); ++n) {
        const CdgNode& node = cdg.nodes[n];
        out += "  n" + std::to_string(n) + " [label=\"";
        switch (node.kind) {
            case NodeKind::Entry: out += "entry " + fn.name; break;
            case NodeKind::Predicate: out += "pred@" + std::to_string(node.ast_node); break;
            case NodeKind::Region: out += "region"; break;
        }
        out += "\"];\n";
    }
    for (const auto& e : cdg.edges) {
        const std::string head =
            e.head >= 0 ? "n" + std::to_string(e.head) : "leaf" + std::to_string(e.id);
        if (e.head < 0)
            out += "  leaf" + std::to_string(e.id) + " [shape=point];\n";
        out += "  n" + std::to_string(e.from) + " -> " + head + " [label=\"";
        switch (e.label) {
            case EdgeLabel::True: out += "T"; break;
            case EdgeLabel::False: out += "F"; break;
            case EdgeLabel::Unconditional: out += "u"; break;
        }
        out += "\"];\n";
    }
    out += "}\n";
    return out;
}

ProgramCdg collect_targets(const Program& program) {
    ProgramCdg pc;
    pc.table = TargetTable::enumerate(program);
    pc.cdgs.reserve(program.functions.size());
    for (const auto& fn : program.functions) {
        pc.cdgs.push_back(build_cdg(program, fn.id, pc.table));
        pc.path_counts.push_back(independent_paths(pc.cdgs.back()));
    }
    pc.parent_edge.assign(pc.table.size(), -1);
    pc.depth.assign(pc.table.size(), 0);
    for (const auto& cdg : pc.cdgs) {
        // Parent edge of a branch target: the nearest enclosing outcome
        // edge, found by walking the tree from the root.
        struct Item {
            int node;
            int enclosing; // outcome edge index, -1 at top level
            int depth;
        };
        std::vector<Item> stack{{cdg.root, -1, 0}};
        while (!stack.empty()) {
            const Item item = stack.back();
            stack.pop_back();
            for (int eid : cdg.nodes[static_cast<std::size_t>(item.node)].out) {
                const CdgEdge& e = cdg.edges[static_cast<std::size_t>(eid)];
                int enclosing = item.enclosing;
                int depth = item.depth;
                if (e.label != EdgeLabel::Unconditional) {
                    for (TargetId u : e.phi) {
                        pc.parent_edge[static_cast<std::size_t>(u)] = item.enclosing;
                        pc.depth[static_cast<std::size_t>(u)] = item.depth;
                    }
                    enclosing = eid;
                    depth = item.depth + 1;
                }
                if (e.head >= 0) stack.push_back({e.head, enclosing, depth});
            }
        }
    }
    return pc;
}

} // namespace sbstlab::cdg

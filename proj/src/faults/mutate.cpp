#include "sbstlab/faults/mutate.hpp"

#include <algorithm>
#include <limits>

#include "sbstlab/errors.hpp"
#include "sbstlab/minilang/parser.hpp"
#include "sbstlab/minilang/printer.hpp"

namespace sbstlab::faults {

using minilang::BinOp;
using minilang::Expr;
using minilang::ExprKind;
using minilang::ExprRef;
using minilang::Function;
using minilang::NodeId;
using minilang::Program;
using minilang::Stmt;
using minilang::StmtKind;
using minilang::StmtRef;

std::string_view mut_op_name(MutOp op) {
    switch (op) {
        case MutOp::Ror: return "ror";
        case MutOp::Aor: return "aor";
        case MutOp::ConstPerturb: return "const_perturbation";
        case MutOp::CondNegate: return "condition_negation";
        case MutOp::AssignDelete: return "assignment_deletion";
    }
    return "?";
}

MutOp mut_op_from_name(std::string_view name) {
    for (MutOp op : all_mut_ops())
        if (mut_op_name(op) == name) return op;
    throw Error(ErrorCode::ConfigError, "unknown mutation operator '" + std::string(name) + "'");
}

const std::vector<MutOp>& all_mut_ops() {
    static const std::vector<MutOp> ops = {MutOp::Ror, MutOp::Aor, MutOp::ConstPerturb,
                                           MutOp::CondNegate, MutOp::AssignDelete};
    return ops;
}

namespace {

/// A concrete place a mutation can apply: either an expression or a
/// statement of one function.
struct Site {
    bool is_stmt = false;
    std::int32_t ref = -1; // ExprRef or StmtRef
    NodeId node = -1;
};

std::vector<Site> compatible_sites(const Function& fn, MutOp op) {
    std::vector<Site> sites;
    switch (op) {
        case MutOp::Ror:
            for (std::size_t i = 0; i < fn.exprs.size(); ++i) {
                const Expr& e = fn.exprs[i];
                if (e.kind == ExprKind::Binary && minilang::is_relational(e.bin_op))
                    sites.push_back({false, static_cast<std::int32_t>(i), e.node_id});
            }
            break;
        case MutOp::Aor:
            for (std::size_t i = 0; i < fn.exprs.size(); ++i) {
                const Expr& e = fn.exprs[i];
                if (e.kind == ExprKind::Binary && minilang::is_arithmetic(e.bin_op))
                    sites.push_back({false, static_cast<std::int32_t>(i), e.node_id});
            }
            break;
        case MutOp::ConstPerturb:
            for (std::size_t i = 0; i < fn.exprs.size(); ++i) {
                const Expr& e = fn.exprs[i];
                if (e.kind == ExprKind::IntLit)
                    sites.push_back({false, static_cast<std::int32_t>(i), e.node_id});
            }
            break;
        case MutOp::CondNegate:
            for (std::size_t i = 0; i < fn.stmts.size(); ++i) {
                const Stmt& st = fn.stmts[i];
                if (st.kind == StmtKind::If || st.kind == StmtKind::While)
                    sites.push_back({true, static_cast<std::int32_t>(i), st.node_id});
            }
            break;
        case MutOp::AssignDelete:
            for (std::size_t i = 0; i < fn.stmts.size(); ++i) {
                const Stmt& st = fn.stmts[i];
                if (st.kind == StmtKind::Assign)
                    sites.push_back({true, static_cast<std::int32_t>(i), st.node_id});
            }
            break;
    }
    // Arena order is creation order; sort by node id so choices are stable
    // under any future arena reshuffling.
    std::sort(sites.begin(), sites.end(), [](const Site& a, const Site& b) { return a.node < b.node; });
    return sites;
}

BinOp replacement_op(BinOp current, bool relational, Rng& rng) {
    static const std::vector<BinOp> rel = {BinOp::Lt, BinOp::Le, BinOp::Gt,
                                           BinOp::Ge, BinOp::Eq, BinOp::Ne};
    static const std::vector<BinOp> arith = {BinOp::Add, BinOp::Sub, BinOp::Mul, BinOp::Div,
                                             BinOp::Mod};
    const auto& pool = relational ? rel : arith;
    for (;;) {
        const BinOp pick = rng.pick(pool);
        if (pick != current) return pick;
    }
}

void remove_stmt_ref(std::vector<StmtRef>& block, StmtRef target, Function& fn) {
    auto it = std::find(block.begin(), block.end(), target);
    if (it != block.end()) {
        block.erase(it);
        return;
    }
    for (StmtRef ref : block) {
        Stmt& st = fn.stmts[static_cast<std::size_t>(ref)];
        if (st.kind == StmtKind::If || st.kind == StmtKind::While) {
            remove_stmt_ref(st.body, target, fn);
            remove_stmt_ref(st.orelse, target, fn);
        }
    }
}

void apply_mutation(Function& fn, const Site& site, MutOp op, Rng& rng) {
    switch (op) {
        case MutOp::Ror: {
            Expr& e = fn.exprs[static_cast<std::size_t>(site.ref)];
            e.bin_op = replacement_op(e.bin_op, true, rng);
            break;
        }
        case MutOp::Aor: {
            Expr& e = fn.exprs[static_cast<std::size_t>(site.ref)];
            e.bin_op = replacement_op(e.bin_op, false, rng);
            break;
        }
        case MutOp::ConstPerturb: {
            Expr& e = fn.exprs[static_cast<std::size_t>(site.ref)];
            std::int64_t delta = rng.coin(0.5) ? 1 : -1;
            // Literals are non-negative in the grammar; keep them in range.
            if (e.int_val == 0) delta = 1;
            else if (e.int_val == std::numeric_limits<std::int64_t>::max()) delta = -1;
            e.int_val += delta;
            break;
        }
        case MutOp::CondNegate: {
            Stmt& st = fn.stmts[static_cast<std::size_t>(site.ref)];
            Expr wrap;
            wrap.kind = ExprKind::Unary;
            wrap.un_op = minilang::UnOp::Not;
            wrap.a = st.expr;
            fn.exprs.push_back(std::move(wrap));
            st.expr = static_cast<ExprRef>(fn.exprs.size() - 1);
            break;
        }
        case MutOp::AssignDelete: {
            remove_stmt_ref(fn.body, site.ref, fn);
            break;
        }
    }
}

} // namespace

FaultedPair inject(const Program& fixed, const FaultSpec& spec, Rng& rng) {
    if (spec.site_count < 1)
        throw Error(ErrorCode::ConfigError, "site_count must be >= 1");

    std::vector<int> mutatable;
    for (const auto& fn : fixed.functions)
        if (!compatible_sites(fn, spec.op).empty()) mutatable.push_back(fn.id);
    if (mutatable.empty())
        throw Error(ErrorCode::NoCompatibleSite,
                    std::string("operator ") + std::string(mut_op_name(spec.op)) +
                        " applies nowhere in " + fixed.source_name);
    if (static_cast<int>(mutatable.size()) < spec.site_count)
        throw Error(ErrorCode::InsufficientFunctions,
                    "requested " + std::to_string(spec.site_count) + " sites but only " +
                        std::to_string(mutatable.size()) + " functions are mutatable");

    Program working = fixed; // deep copy: arenas are value types

    FaultedPair pair;
    pair.fixed = fixed;
    pair.ground_truth.assign(fixed.functions.size(), 0);

    const auto chosen = rng.sample_without_replacement(mutatable.size(),
                                                       static_cast<std::size_t>(spec.site_count));
    std::vector<int> fn_ids;
    for (std::size_t pick : chosen) fn_ids.push_back(mutatable[pick]);
    std::sort(fn_ids.begin(), fn_ids.end());

    for (int fn_id : fn_ids) {
        Function& fn = working.functions[static_cast<std::size_t>(fn_id)];
        const auto sites = compatible_sites(fn, spec.op);
        const Site& site = sites[static_cast<std::size_t>(
            rng.uniform_int(0, static_cast<std::int64_t>(sites.size()) - 1))];
        apply_mutation(fn, site, spec.op, rng);
        pair.ground_truth[static_cast<std::size_t>(fn_id)] = 1;
        pair.sites.push_back({fn_id, site.node, spec.op});
    }

    // Re-canonicalize so the buggy program's node ids are what any
    // reader of buggy.mlp would reconstruct.
    pair.buggy = minilang::parse_program(minilang::print_program(working), fixed.source_name);
    return pair;
}

minilang::Value sample_arg(minilang::Type type, Rng& rng) {
    if (type == minilang::Type::Bool) return minilang::Value::of_bool(rng.coin(0.5));
    return minilang::Value::of_int(rng.uniform_int(kArgMin, kArgMax));
}

bool check_detectable(const FaultedPair& pair, int samples, Rng& rng,
                      const minilang::Limits& limits) {
    if (samples < 1) throw Error(ErrorCode::ConfigError, "samples must be >= 1");
    const int k = pair.fixed.function_count();
    for (int s = 0; s < samples; ++s) {
        const int entry = static_cast<int>(rng.uniform_int(0, k - 1));
        const auto& params = pair.fixed.functions[static_cast<std::size_t>(entry)].params;
        std::vector<minilang::Value> args;
        args.reserve(params.size());
        for (const auto& p : params) args.push_back(sample_arg(p.type, rng));
        const auto fixed_out = minilang::execute(pair.fixed, entry, args, limits);
        const auto buggy_out = minilang::execute(pair.buggy, entry, args, limits);
        if (!fixed_out.same_observable(buggy_out)) return true;
    }
    return false;
}

} // namespace sbstlab::faults

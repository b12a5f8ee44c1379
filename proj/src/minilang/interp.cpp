#include "sbstlab/minilang/interp.hpp"

#include <algorithm>

#include "sbstlab/errors.hpp"
#include "sbstlab/fitness/fitness.hpp"

namespace sbstlab::minilang {

namespace {

inline std::int64_t wrap_add(std::int64_t a, std::int64_t b) {
    return static_cast<std::int64_t>(static_cast<std::uint64_t>(a) + static_cast<std::uint64_t>(b));
}
inline std::int64_t wrap_sub(std::int64_t a, std::int64_t b) {
    return static_cast<std::int64_t>(static_cast<std::uint64_t>(a) - static_cast<std::uint64_t>(b));
}
inline std::int64_t wrap_mul(std::int64_t a, std::int64_t b) {
    return static_cast<std::int64_t>(static_cast<std::uint64_t>(a) * static_cast<std::uint64_t>(b));
}
inline std::int64_t wrap_neg(std::int64_t a) {
    return static_cast<std::int64_t>(0 - static_cast<std::uint64_t>(a));
}

constexpr std::int64_t kInt64Min = static_cast<std::int64_t>(0x8000000000000000ULL);

struct CondVal {
    bool value = false;
    double dist_true = 0.0;
    double dist_false = 0.0;
};

class Machine {
  public:
    Machine(const Program& prog, const Limits& limits, ExecOutcome& out)
        : prog_(prog), limits_(limits), out_(out),
          entered_(prog.functions.size(), 0) {}

    void run(int entry, const std::vector<std::int64_t>& args) {
        const std::int64_t result = call(entry, args);
        if (trapped_) {
            out_.status = ExecOutcome::Status::Trapped;
            out_.trap = trap_;
        } else {
            out_.status = ExecOutcome::Status::Returned;
            out_.value = result;
        }
        for (std::size_t i = 0; i < entered_.size(); ++i)
            if (entered_[i]) out_.trace.entered_functions.push_back(static_cast<int>(i));
    }

  private:
    enum class Flow : std::uint8_t { Normal, Return, Trap };

    bool step() {
        if (++steps_ > limits_.max_steps) {
            trap(TrapKind::StepLimit);
            return false;
        }
        return true;
    }

    void trap(TrapKind kind) {
        if (!trapped_) {
            trapped_ = true;
            trap_ = kind;
        }
    }

    std::int64_t call(int fn_id, const std::vector<std::int64_t>& args) {
        if (depth_ + 1 > limits_.max_call_depth) {
            trap(TrapKind::RecursionLimit);
            return 0;
        }
        ++depth_;
        entered_[static_cast<std::size_t>(fn_id)] = 1;
        const Function& fn = prog_.functions[static_cast<std::size_t>(fn_id)];

        // Frame slots live in a shared stack; all slots start at zero.
        const std::size_t base = stack_.size();
        stack_.resize(base + static_cast<std::size_t>(fn.slot_count), 0);
        for (std::size_t i = 0; i < args.size(); ++i) stack_[base + i] = args[i];

        std::int64_t result = 0;
        exec_block(fn, base, fn.body, result);

        stack_.resize(base);
        --depth_;
        return result;
    }

    Flow exec_block(const Function& fn, std::size_t base, const std::vector<StmtRef>& block,
                    std::int64_t& result) {
        for (StmtRef ref : block) {
            const Flow f = exec_stmt(fn, base, ref, result);
            if (f != Flow::Normal) return f;
        }
        return Flow::Normal;
    }

    Flow exec_stmt(const Function& fn, std::size_t base, StmtRef ref, std::int64_t& result) {
        if (!step()) return Flow::Trap;
        const Stmt& st = fn.stmt(ref);
        switch (st.kind) {
            case StmtKind::Let:
            case StmtKind::Assign: {
                const std::int64_t v = eval(fn, base, st.expr);
                if (trapped_) return Flow::Trap;
                stack_[base + static_cast<std::size_t>(st.slot)] = v;
                return Flow::Normal;
            }
            case StmtKind::If: {
                CondVal cv;
                if (!eval_cond(fn, base, st.expr, cv)) return Flow::Trap;
                record_event(st, cv);
                return exec_block(fn, base, cv.value ? st.body : st.orelse, result);
            }
            case StmtKind::While: {
                for (;;) {
                    CondVal cv;
                    if (!eval_cond(fn, base, st.expr, cv)) return Flow::Trap;
                    record_event(st, cv);
                    if (!cv.value) return Flow::Normal;
                    const Flow f = exec_block(fn, base, st.body, result);
                    if (f != Flow::Normal) return f;
                    if (!step()) return Flow::Trap; // loop back-edge
                }
            }
            case StmtKind::Return: {
                result = 0;
                if (st.expr >= 0) {
                    result = eval(fn, base, st.expr);
                    if (trapped_) return Flow::Trap;
                }
                return Flow::Return;
            }
            case StmtKind::Output: {
                const std::int64_t v = eval(fn, base, st.expr);
                if (trapped_) return Flow::Trap;
                out_.outputs.push_back(v);
                return Flow::Normal;
            }
        }
        return Flow::Normal;
    }

    /// Condition evaluation: truth value plus branch distances toward both
    /// outcomes. Comparisons use the distance table; and/or compose
    /// (sum/min); an operand skipped by short-circuiting contributes K.
    bool eval_cond(const Function& fn, std::size_t base, ExprRef ref, CondVal& cv) {
        if (!step()) return false;
        const Expr& e = fn.expr(ref);
        if (e.kind == ExprKind::Binary) {
            if (is_relational(e.bin_op)) {
                const std::int64_t l = eval(fn, base, e.a);
                if (trapped_) return false;
                const std::int64_t r = eval(fn, base, e.b);
                if (trapped_) return false;
                cv.value = compare(e.bin_op, l, r);
                cv.dist_true = fitness::branch_distance(e.bin_op, l, r, true);
                cv.dist_false = fitness::branch_distance(e.bin_op, l, r, false);
                last_cmp_lhs_ = l;
                last_cmp_rhs_ = r;
                last_was_cmp_ = true;
                return true;
            }
            if (e.bin_op == BinOp::And) {
                CondVal a;
                if (!eval_cond(fn, base, e.a, a)) return false;
                if (!a.value) {
                    cv.value = false;
                    cv.dist_true = a.dist_true + fitness::kK;
                    cv.dist_false = 0.0;
                } else {
                    CondVal b;
                    if (!eval_cond(fn, base, e.b, b)) return false;
                    cv.value = b.value;
                    cv.dist_true = a.dist_true + b.dist_true;
                    cv.dist_false = std::min(a.dist_false, b.dist_false);
                }
                last_was_cmp_ = false;
                return true;
            }
            if (e.bin_op == BinOp::Or) {
                CondVal a;
                if (!eval_cond(fn, base, e.a, a)) return false;
                if (a.value) {
                    cv.value = true;
                    cv.dist_true = 0.0;
                    cv.dist_false = a.dist_false + fitness::kK;
                } else {
                    CondVal b;
                    if (!eval_cond(fn, base, e.b, b)) return false;
                    cv.value = b.value;
                    cv.dist_true = std::min(a.dist_true, b.dist_true);
                    cv.dist_false = a.dist_false + b.dist_false;
                }
                last_was_cmp_ = false;
                return true;
            }
        }
        if (e.kind == ExprKind::Unary && e.un_op == UnOp::Not) {
            CondVal a;
            if (!eval_cond(fn, base, e.a, a)) return false;
            cv.value = !a.value;
            cv.dist_true = a.dist_false;
            cv.dist_false = a.dist_true;
            last_was_cmp_ = false;
            return true;
        }
        // Plain boolean leaf: distance K when the outcome is wrong.
        const std::int64_t v = eval_at(fn, base, e); // node already step-counted above
        if (trapped_) return false;
        cv.value = v != 0;
        cv.dist_true = cv.value ? 0.0 : fitness::kK;
        cv.dist_false = cv.value ? fitness::kK : 0.0;
        last_was_cmp_ = false;
        return true;
    }

    void record_event(const Stmt& st, const CondVal& cv) {
        PredicateEvent ev;
        ev.node = st.node_id;
        ev.outcome = cv.value;
        ev.dist_true = cv.dist_true;
        ev.dist_false = cv.dist_false;
        if (last_was_cmp_) {
            ev.lhs = last_cmp_lhs_;
            ev.rhs = last_cmp_rhs_;
        } else {
            ev.lhs = cv.value ? 1 : 0;
        }
        out_.trace.predicate_events.push_back(ev);
    }

    std::int64_t eval(const Function& fn, std::size_t base, ExprRef ref) {
        if (!step()) return 0;
        return eval_at(fn, base, fn.expr(ref));
    }

    std::int64_t eval_at(const Function& fn, std::size_t base, const Expr& e) {
        switch (e.kind) {
            case ExprKind::IntLit:
                return e.int_val;
            case ExprKind::BoolLit:
                return e.bool_val ? 1 : 0;
            case ExprKind::Var:
                return stack_[base + static_cast<std::size_t>(e.slot)];
            case ExprKind::Unary: {
                if (e.un_op == UnOp::Not) {
                    const std::int64_t v = eval(fn, base, e.a);
                    if (trapped_) return 0;
                    return v == 0 ? 1 : 0;
                }
                const std::int64_t v = eval(fn, base, e.a);
                if (trapped_) return 0;
                return wrap_neg(v);
            }
            case ExprKind::Binary: {
                if (e.bin_op == BinOp::And) {
                    const std::int64_t l = eval(fn, base, e.a);
                    if (trapped_ || l == 0) return 0;
                    const std::int64_t r = eval(fn, base, e.b);
                    if (trapped_) return 0;
                    return r != 0 ? 1 : 0;
                }
                if (e.bin_op == BinOp::Or) {
                    const std::int64_t l = eval(fn, base, e.a);
                    if (trapped_) return 0;
                    if (l != 0) return 1;
                    const std::int64_t r = eval(fn, base, e.b);
                    if (trapped_) return 0;
                    return r != 0 ? 1 : 0;
                }
                const std::int64_t l = eval(fn, base, e.a);
                if (trapped_) return 0;
                const std::int64_t r = eval(fn, base, e.b);
                if (trapped_) return 0;
                return apply_binop(e.bin_op, l, r);
            }
            case ExprKind::Call: {
                args_buf_.clear();
                for (ExprRef a : e.args) {
                    args_buf_.push_back(eval(fn, base, a));
                    if (trapped_) return 0;
                }
                // args_buf_ is reused across calls; copy before recursing.
                const std::vector<std::int64_t> args = args_buf_;
                return call(e.callee, args);
            }
        }
        return 0;
    }

    std::int64_t apply_binop(BinOp op, std::int64_t l, std::int64_t r) {
        switch (op) {
            case BinOp::Add: return wrap_add(l, r);
            case BinOp::Sub: return wrap_sub(l, r);
            case BinOp::Mul: return wrap_mul(l, r);
            case BinOp::Div:
                if (r == 0) {
                    trap(TrapKind::DivZero);
                    return 0;
                }
                if (l == kInt64Min && r == -1) return kInt64Min; // wraps
                return l / r;
            case BinOp::Mod:
                if (r == 0) {
                    trap(TrapKind::DivZero);
                    return 0;
                }
                if (l == kInt64Min && r == -1) return 0;
                return l % r;
            default:
                return compare(op, l, r) ? 1 : 0;
        }
    }

    static bool compare(BinOp op, std::int64_t l, std::int64_t r) {
        switch (op) {
            case BinOp::Lt: return l < r;
            case BinOp::Le: return l <= r;
            case BinOp::Gt: return l > r;
            case BinOp::Ge: return l >= r;
            case BinOp::Eq: return l == r;
            case BinOp::Ne: return l != r;
            default: return false;
        }
    }

    const Program& prog_;
    const Limits& limits_;
    ExecOutcome& out_;
    std::vector<std::uint8_t> entered_;
    std::vector<std::int64_t> stack_;
    std::vector<std::int64_t> args_buf_;
    std::int64_t steps_ = 0;
    int depth_ = 0;
    bool trapped_ = false;
    TrapKind trap_{};
    bool last_was_cmp_ = false;
    std::int64_t last_cmp_lhs_ = 0;
    std::int64_t last_cmp_rhs_ = 0;
};

} // namespace

std::string_view trap_name(TrapKind k) {
    switch (k) {
        case TrapKind::DivZero: return "div_zero";
        case TrapKind::StepLimit: return "step_limit";
        case TrapKind::RecursionLimit: return "recursion_limit";
    }
    return "?";
}

bool ExecTrace::entered(int fn_id) const {
    return std::binary_search(entered_functions.begin(), entered_functions.end(), fn_id);
}

bool ExecOutcome::same_observable(const ExecOutcome& other) const {
    if (status != other.status) return false;
    if (status == Status::Returned) {
        if (value != other.value) return false;
    } else {
        if (trap != other.trap) return false;
    }
    return outputs == other.outputs;
}

ExecOutcome execute(const Program& program, int entry, const std::vector<Value>& args,
                    const Limits& limits) {
    if (entry < 0 || entry >= program.function_count())
        throw Error(ErrorCode::ArityMismatch, "no function with id " + std::to_string(entry));
    const Function& fn = program.functions[static_cast<std::size_t>(entry)];
    if (args.size() != fn.params.size())
        throw Error(ErrorCode::ArityMismatch,
                    fn.name + " expects " + std::to_string(fn.params.size()) + " arguments, got " +
                        std::to_string(args.size()));
    std::vector<std::int64_t> raw(args.size());
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i].type != fn.params[i].type)
            throw Error(ErrorCode::TypeMismatch,
                        fn.name + " parameter '" + fn.params[i].name + "' expects " +
                            std::string(type_name(fn.params[i].type)));
        raw[i] = fn.params[i].type == Type::Bool ? (args[i].raw != 0 ? 1 : 0) : args[i].raw;
    }

    ExecOutcome out;
    Machine machine(program, limits, out);
    machine.run(entry, raw);
    return out;
}

std::vector<FunctionInfo> list_functions(const Program& program) {
    std::vector<FunctionInfo> out;
    out.reserve(program.functions.size());
    for (const auto& fn : program.functions) {
        FunctionInfo info;
        info.id = fn.id;
        info.name = fn.name;
        info.arity = static_cast<int>(fn.params.size());
        for (const auto& p : fn.params) info.param_types.push_back(p.type);
        out.push_back(std::move(info));
    }
    return out;
}

} // namespace sbstlab::minilang

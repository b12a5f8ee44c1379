#include "sbstlab/faults/generate.hpp"

#include <string>

#include "sbstlab/errors.hpp"
#include "sbstlab/minilang/parser.hpp"

namespace sbstlab::faults {

using minilang::Program;

namespace {

/// Emits source text directly; the parser is the single source of truth
/// for well-formedness.
class SourceWriter {
  public:
    SourceWriter(Rng& rng, int fn_count, int depth_min, int depth_max)
        : rng_(rng), fn_count_(fn_count), depth_min_(depth_min), depth_max_(depth_max) {}

    std::string write() {
        std::string out;
        for (int i = 0; i < fn_count_; ++i) {
            if (i > 0) out += '\n';
            write_function(out, i);
        }
        return out;
    }

  private:
    struct Var {
        std::string name;
        bool is_bool = false;
    };

    void write_function(std::string& out, int index) {
        fn_index_ = index;
        vars_.clear();
        let_counter_ = 0;
        leaf_counter_ = static_cast<std::int64_t>(index) * 16 + 1;

        const int arity = static_cast<int>(rng_.uniform_int(1, 3));
        arities_.push_back(arity);
        bool_params_.emplace_back();
        out += "fn f" + std::to_string(index) + "(";
        for (int p = 0; p < arity; ++p) {
            const bool is_bool = p > 0 && rng_.coin(0.2);
            bool_params_.back().push_back(is_bool);
            Var v{std::string(1, static_cast<char>('a' + p)), is_bool};
            if (p > 0) out += ", ";
            out += v.name + ": " + (is_bool ? "bool" : "int");
            vars_.push_back(std::move(v));
        }
        out += ") {\n";
        const int depth = static_cast<int>(rng_.uniform_int(depth_min_, depth_max_));
        write_block(out, 1, depth);
        out += "  return " + leaf_return_expr() + ";\n";
        out += "}\n";
    }

    /// Branch-distinct result: folding in a fresh constant keeps the leaf
    /// behaviors apart, which makes injected faults observable.
    std::string leaf_return_expr() {
        return "(" + arith_expr(1) + " + " + std::to_string(leaf_counter_++) + ")";
    }

    void write_block(std::string& out, int indent, int depth) {
        const int stmts = static_cast<int>(rng_.uniform_int(1, 3));
        for (int s = 0; s < stmts; ++s) write_stmt(out, indent, depth);
    }

    void write_stmt(std::string& out, int indent, int depth) {
        const std::string pad(static_cast<std::size_t>(indent) * 2, ' ');
        const double roll = rng_.uniform_real();
        if (depth > 0 && roll < 0.45) {
            // if / if-else
            out += pad + "if (" + condition() + ") {\n";
            write_block(out, indent + 1, depth - 1);
            maybe_return(out, indent + 1);
            if (rng_.coin(0.6)) {
                out += pad + "} else {\n";
                write_block(out, indent + 1, depth - 1);
                maybe_return(out, indent + 1);
            }
            out += pad + "}\n";
        } else if (depth > 0 && roll < 0.55) {
            // bounded counting loop
            const std::string counter = fresh_let();
            const std::string bound = std::to_string(rng_.uniform_int(1, 4));
            out += pad + "let " + counter + " = 0;\n";
            out += pad + "while (" + counter + " < " + bound + ") {\n";
            write_block(out, indent + 1, depth - 1);
            out += pad + "  " + counter + " = (" + counter + " + 1);\n";
            out += pad + "}\n";
        } else if (roll < 0.8 || int_vars().empty()) {
            // new local
            const std::string name = fresh_let();
            out += pad + "let " + name + " = " + value_expr() + ";\n";
        } else if (rng_.coin(0.7)) {
            // reassignment
            out += pad + rng_.pick(int_vars()) + " = " + arith_expr(2) + ";\n";
        } else {
            out += pad + "output(" + arith_expr(1) + ");\n";
        }
    }

    void maybe_return(std::string& out, int indent) {
        if (!rng_.coin(0.5)) return;
        const std::string pad(static_cast<std::size_t>(indent) * 2, ' ');
        out += pad + "return " + leaf_return_expr() + ";\n";
    }

    std::string fresh_let() {
        Var v{"v" + std::to_string(let_counter_++), false};
        vars_.push_back(v);
        return v.name;
    }

    std::vector<std::string> int_vars() const {
        std::vector<std::string> out;
        for (const auto& v : vars_)
            if (!v.is_bool) out.push_back(v.name);
        return out;
    }

    std::vector<std::string> bool_vars() const {
        std::vector<std::string> out;
        for (const auto& v : vars_)
            if (v.is_bool) out.push_back(v.name);
        return out;
    }

    std::string value_expr() {
        // A call to an earlier function now and then keeps the corpus
        // exercising the interprocedural paths.
        if (fn_index_ > 0 && rng_.coin(0.2)) {
            const int callee = static_cast<int>(rng_.uniform_int(0, fn_index_ - 1));
            return "f" + std::to_string(callee) + "(" + call_args(callee) + ")";
        }
        return arith_expr(2);
    }

    std::string call_args(int callee) {
        // Callee arity is not tracked here; regenerate the same arity the
        // writer used for that function. Arities are drawn first per
        // function, so record them.
        std::string out;
        const int arity = arities_[static_cast<std::size_t>(callee)];
        for (int i = 0; i < arity; ++i) {
            if (i > 0) out += ", ";
            if (bool_params_[static_cast<std::size_t>(callee)][static_cast<std::size_t>(i)])
                out += rng_.coin(0.5) ? "true" : "false";
            else
                out += operand();
        }
        return out;
    }

    std::string operand() {
        const auto ints = int_vars();
        if (!ints.empty() && rng_.coin(0.7)) return rng_.pick(ints);
        return std::to_string(rng_.uniform_int(0, 50));
    }

    std::string arith_expr(int depth) {
        if (depth == 0 || rng_.coin(0.35)) return operand();
        static const std::vector<std::string> ops = {"+", "-", "*", "+", "-"};
        const std::string op = rng_.pick(ops);
        return "(" + arith_expr(depth - 1) + " " + op + " " + arith_expr(depth - 1) + ")";
    }

    std::string comparison() {
        // Equality guards are rarer and make deep branches genuinely hard.
        static const std::vector<std::string> ops = {"<", "<=", ">", ">=", "<", ">", "==", "!="};
        const std::string op = rng_.pick(ops);
        const std::string lhs = rng_.coin(0.75) ? operand() : arith_expr(1);
        std::string rhs;
        if (op == "==" || op == "!=")
            rhs = std::to_string(rng_.uniform_int(-30, 30));
        else
            rhs = rng_.coin(0.6) ? std::to_string(rng_.uniform_int(-40, 40)) : operand();
        if (!rhs.empty() && rhs[0] == '-') rhs = "(0 - " + rhs.substr(1) + ")";
        return lhs + " " + op + " " + rhs;
    }

    std::string condition() {
        const auto bools = bool_vars();
        if (!bools.empty() && rng_.coin(0.25)) {
            const std::string b = rng_.pick(bools);
            if (rng_.coin(0.5)) return b;
            return b + " and " + comparison();
        }
        if (rng_.coin(0.15)) {
            const std::string joiner = rng_.coin(0.5) ? " and " : " or ";
            return comparison() + joiner + comparison();
        }
        return comparison();
    }

    // Signatures of already-emitted functions, consulted for calls.
    std::vector<int> arities_;
    std::vector<std::vector<bool>> bool_params_;

    Rng& rng_;
    int fn_count_;
    int depth_min_;
    int depth_max_;
    int fn_index_ = 0;
    int let_counter_ = 0;
    std::int64_t leaf_counter_ = 0;
    std::vector<Var> vars_;
};

} // namespace

Program random_program(Rng& rng, int fn_count, int depth_min, int depth_max,
                       const std::string& source_name) {
    SourceWriter writer(rng, fn_count, depth_min, depth_max);
    return minilang::parse_program(writer.write(), source_name);
}

std::vector<PairRecord> gen_corpus(const GenParams& params) {
    if (params.fns_min < 1 || params.fns_max < params.fns_min || params.depth_min < 0 ||
        params.depth_max < params.depth_min)
        throw Error(ErrorCode::ConfigError, "invalid generation ranges");

    // Expand the plan into one site_count per slot.
    std::vector<int> slot_sites;
    for (const auto& [site_count, count] : params.site_plan) {
        const int n = count > 0 ? count : params.n_programs - static_cast<int>(slot_sites.size());
        for (int i = 0; i < n; ++i) slot_sites.push_back(site_count);
    }
    if (static_cast<int>(slot_sites.size()) != params.n_programs)
        throw Error(ErrorCode::ConfigError, "site plan does not cover n_programs slots");

    std::vector<PairRecord> out;
    out.reserve(slot_sites.size());
    for (std::size_t slot = 0; slot < slot_sites.size(); ++slot) {
        const std::uint64_t seed = derive_seed(params.master_seed, "corpus-slot", {slot});
        Rng rng(seed);
        PairRecord rec;
        rec.seed = seed;
        rec.site_count = slot_sites[slot];
        char name[16];
        std::snprintf(name, sizeof name, "p%03zu", slot);
        rec.id = name;

        bool done = false;
        for (int attempt = 0; attempt < params.max_attempts && !done; ++attempt) {
            rec.attempts = attempt + 1;
            const int fns =
                static_cast<int>(rng.uniform_int(std::max(params.fns_min, rec.site_count),
                                                 std::max(params.fns_max, rec.site_count)));
            const int depth_min = params.depth_min;
            const int depth_max = params.depth_max;
            Program fixed;
            try {
                fixed = random_program(rng, fns, depth_min, depth_max, rec.id + ".mlp");
            } catch (const Error&) {
                continue; // regenerate; the writer occasionally dead-ends
            }
            FaultSpec spec;
            spec.op = rng.pick(params.operators);
            spec.site_count = rec.site_count;
            FaultedPair pair;
            try {
                pair = inject(fixed, spec, rng);
            } catch (const Error& e) {
                if (e.code() == ErrorCode::NoCompatibleSite ||
                    e.code() == ErrorCode::InsufficientFunctions)
                    continue;
                throw;
            }
            if (!check_detectable(pair, params.detect_samples, rng)) continue;
            rec.op = spec.op;
            rec.pair = std::move(pair);
            done = true;
        }
        if (!done)
            throw Error(ErrorCode::GenerationExhausted,
                        "slot " + rec.id + " produced no detectable pair in " +
                            std::to_string(params.max_attempts) + " attempts");
        out.push_back(std::move(rec));
    }
    return out;
}

} // namespace sbstlab::faults

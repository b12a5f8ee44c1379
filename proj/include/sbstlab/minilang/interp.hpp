#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "sbstlab/minilang/ast.hpp"

namespace sbstlab::minilang {

struct Limits {
    std::int64_t max_steps = 10000;
    int max_call_depth = 64;
};

enum class TrapKind : std::uint8_t { DivZero, StepLimit, RecursionLimit };

std::string_view trap_name(TrapKind k);

/// Typed argument / result value. Inside the interpreter everything is a
/// 64-bit integer (bool is 0/1); the type tag matters at the call boundary
/// and for input sampling.
struct Value {
    Type type{};
    std::int64_t raw = 0;

    static Value of_int(std::int64_t v) { return {Type::Int, v}; }
    static Value of_bool(bool v) { return {Type::Bool, v ? 1 : 0}; }
    bool operator==(const Value&) const = default;
};

/// One record per evaluation of an if/while condition. `lhs`/`rhs` hold the
/// operand values when the condition is a single comparison; for compound
/// conditions `lhs` is the condition's truth value and `rhs` is empty.
/// `dist_true`/`dist_false` are the branch distances toward each outcome,
/// composed over and/or/not during evaluation.
struct PredicateEvent {
    NodeId node = -1;
    std::int64_t lhs = 0;
    std::optional<std::int64_t> rhs;
    bool outcome = false;
    double dist_true = 0.0;
    double dist_false = 0.0;
};

struct ExecTrace {
    std::vector<int> entered_functions; // sorted, unique
    std::vector<PredicateEvent> predicate_events;

    bool entered(int fn_id) const;
};

struct ExecOutcome {
    enum class Status : std::uint8_t { Returned, Trapped };

    Status status = Status::Returned;
    std::int64_t value = 0; // meaningful when Returned
    TrapKind trap{};        // meaningful when Trapped
    std::vector<std::int64_t> outputs;
    ExecTrace trace;

    bool returned() const { return status == Status::Returned; }

    /// The differential observable: status kind, returned value or trap
    /// kind, and the full output list. Traces are not observable.
    bool same_observable(const ExecOutcome& other) const;
};

/// Deterministic instrumented execution of `program.functions[entry]`.
/// Traps are encoded in the outcome; ArityMismatch/TypeMismatch on bad
/// arguments are thrown (caller errors, not program behavior).
ExecOutcome execute(const Program& program, int entry, const std::vector<Value>& args,
                    const Limits& limits = {});

/// (id, name, arity, parameter types) in declaration order.
struct FunctionInfo {
    int id;
    std::string name;
    int arity;
    std::vector<Type> param_types;
};

std::vector<FunctionInfo> list_functions(const Program& program);

} // namespace sbstlab::minilang

#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace sbstlab::minilang {

/// Node ids are unique across a whole program and assigned in declaration
/// order, pre-order within each function. They survive serialization: a
/// program printed and re-parsed gets identical ids.
using NodeId = std::int32_t;

/// Index into the owning function's expr/stmt arenas; -1 means "none".
using ExprRef = std::int32_t;
using StmtRef = std::int32_t;

struct Span {
    int line = 0;
    int col = 0;
    int end_line = 0;
    int end_col = 0;
};

enum class Type : std::uint8_t { Int, Bool };

std::string_view type_name(Type t);

enum class UnOp : std::uint8_t { Neg, Not };

enum class BinOp : std::uint8_t { Add, Sub, Mul, Div, Mod, Lt, Le, Gt, Ge, Eq, Ne, And, Or };

inline bool is_relational(BinOp op) { return op >= BinOp::Lt && op <= BinOp::Ne; }
inline bool is_arithmetic(BinOp op) { return op <= BinOp::Mod; }
std::string_view binop_token(BinOp op);

enum class ExprKind : std::uint8_t { IntLit, BoolLit, Var, Unary, Binary, Call };

struct Expr {
    NodeId node_id = -1;
    Span span;
    ExprKind kind{};
    std::int64_t int_val = 0;  // IntLit
    bool bool_val = false;     // BoolLit
    std::string name;          // Var / Call
    UnOp un_op{};
    BinOp bin_op{};
    ExprRef a = -1;            // Unary operand; Binary lhs
    ExprRef b = -1;            // Binary rhs
    std::vector<ExprRef> args; // Call
    int callee = -1;           // resolved function id
    int slot = -1;             // resolved variable slot (Var)
};

enum class StmtKind : std::uint8_t { Let, Assign, If, While, Return, Output };

struct Stmt {
    NodeId node_id = -1;
    Span span;
    StmtKind kind{};
    std::string var;              // Let / Assign
    int slot = -1;                // resolved variable slot
    ExprRef expr = -1;            // Let/Assign value, If/While condition, Return/Output value
    std::vector<StmtRef> body;    // If then-block, While body
    std::vector<StmtRef> orelse;  // If else-block
    bool has_else = false;
};

struct Param {
    std::string name;
    Type type{};
};

struct Function {
    int id = -1;
    std::string name;
    std::vector<Param> params;
    std::vector<Expr> exprs;
    std::vector<Stmt> stmts;
    std::vector<StmtRef> body;
    int slot_count = 0;               // params first, then lets in source order
    std::vector<StmtRef> predicates;  // if/while statements, pre-order

    const Expr& expr(ExprRef r) const { return exprs[static_cast<std::size_t>(r)]; }
    const Stmt& stmt(StmtRef r) const { return stmts[static_cast<std::size_t>(r)]; }
};

struct Program {
    std::string source_name;
    std::vector<Function> functions;
    int node_count = 0;

    const Function* find(std::string_view name) const;
    int function_count() const { return static_cast<int>(functions.size()); }
};

/// Structural equality: kinds, names, operators, literals and shapes match.
/// Spans are ignored (they depend on layout); node ids are compared because
/// both sides are expected to carry canonical pre-order numbering.
bool structurally_equal(const Program& a, const Program& b);

} // namespace sbstlab::minilang

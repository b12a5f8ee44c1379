#include "sbstlab/minilang/parser.hpp"

#include <cctype>
#include <cstdlib>
#include <map>
#include <unordered_map>

#include "sbstlab/errors.hpp"

namespace sbstlab::minilang {

namespace {

enum class Tok : std::uint8_t {
    Ident, Int, KwFn, KwLet, KwIf, KwElse, KwWhile, KwReturn, KwOutput,
    KwTrue, KwFalse, KwAnd, KwOr, KwNot, KwInt, KwBool,
    LParen, RParen, LBrace, RBrace, Comma, Colon, Semi,
    Assign, EqEq, NotEq, Lt, Le, Gt, Ge, Plus, Minus, Star, Slash, Percent,
    Eof,
};

struct Token {
    Tok kind;
    std::string text;
    std::int64_t int_val = 0;
    int line = 1;
    int col = 1;
};

class Lexer {
  public:
    explicit Lexer(std::string_view src) : src_(src) {}

    Token next() {
        skip_ws();
        Token t;
        t.line = line_;
        t.col = col_;
        if (pos_ >= src_.size()) {
            t.kind = Tok::Eof;
            return t;
        }
        const char c = src_[pos_];
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t start = pos_;
            while (pos_ < src_.size() &&
                   (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
                advance();
            t.text = std::string(src_.substr(start, pos_ - start));
            t.kind = keyword(t.text);
            return t;
        }
        if (std::isdigit(static_cast<unsigned char>(c))) {
            std::uint64_t value = 0;
            while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
                const std::uint64_t digit = static_cast<std::uint64_t>(src_[pos_] - '0');
                if (value > (0x7fffffffffffffffULL - digit) / 10)
                    throw SyntaxError(t.line, t.col, "integer literal out of range");
                value = value * 10 + digit;
                advance();
            }
            t.kind = Tok::Int;
            t.int_val = static_cast<std::int64_t>(value);
            return t;
        }
        advance();
        switch (c) {
            case '(': t.kind = Tok::LParen; return t;
            case ')': t.kind = Tok::RParen; return t;
            case '{': t.kind = Tok::LBrace; return t;
            case '}': t.kind = Tok::RBrace; return t;
            case ',': t.kind = Tok::Comma; return t;
            case ':': t.kind = Tok::Colon; return t;
            case ';': t.kind = Tok::Semi; return t;
            case '+': t.kind = Tok::Plus; return t;
            case '-': t.kind = Tok::Minus; return t;
            case '*': t.kind = Tok::Star; return t;
            case '/': t.kind = Tok::Slash; return t;
            case '%': t.kind = Tok::Percent; return t;
            case '=':
                if (peek() == '=') { advance(); t.kind = Tok::EqEq; } else { t.kind = Tok::Assign; }
                return t;
            case '!':
                if (peek() == '=') { advance(); t.kind = Tok::NotEq; return t; }
                throw SyntaxError(t.line, t.col, "unexpected '!'");
            case '<':
                if (peek() == '=') { advance(); t.kind = Tok::Le; } else { t.kind = Tok::Lt; }
                return t;
            case '>':
                if (peek() == '=') { advance(); t.kind = Tok::Ge; } else { t.kind = Tok::Gt; }
                return t;
            default:
                throw SyntaxError(t.line, t.col, std::string("unexpected character '") + c + "'");
        }
    }

  private:
    static Tok keyword(const std::string& s) {
        static const std::unordered_map<std::string, Tok> table = {
            {"fn", Tok::KwFn},       {"let", Tok::KwLet},     {"if", Tok::KwIf},
            {"else", Tok::KwElse},   {"while", Tok::KwWhile}, {"return", Tok::KwReturn},
            {"output", Tok::KwOutput}, {"true", Tok::KwTrue}, {"false", Tok::KwFalse},
            {"and", Tok::KwAnd},     {"or", Tok::KwOr},       {"not", Tok::KwNot},
            {"int", Tok::KwInt},     {"bool", Tok::KwBool},
        };
        auto it = table.find(s);
        return it == table.end() ? Tok::Ident : it->second;
    }

    char peek() const { return pos_ < src_.size() ? src_[pos_] : '\0'; }

    void advance() {
        if (src_[pos_] == '\n') {
            ++line_;
            col_ = 1;
        } else {
            ++col_;
        }
        ++pos_;
    }

    void skip_ws() {
        while (pos_ < src_.size()) {
            const char c = src_[pos_];
            if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
                advance();
            } else if (c == '/' && pos_ + 1 < src_.size() && src_[pos_ + 1] == '/') {
                while (pos_ < src_.size() && src_[pos_] != '\n') advance();
            } else {
                break;
            }
        }
    }

    std::string_view src_;
    std::size_t pos_ = 0;
    int line_ = 1;
    int col_ = 1;
};

class Parser {
  public:
    explicit Parser(std::string_view src) : lexer_(src) { bump(); }

    Program parse(std::string source_name) {
        Program prog;
        prog.source_name = std::move(source_name);
        while (cur_.kind != Tok::Eof) {
            expect(Tok::KwFn, "expected 'fn'");
            prog.functions.push_back(parse_function());
        }
        if (prog.functions.empty())
            throw Error(ErrorCode::EmptyProgram, "no function declared in " + prog.source_name);

        std::map<std::string, int> by_name;
        for (std::size_t i = 0; i < prog.functions.size(); ++i) {
            auto& fn = prog.functions[i];
            fn.id = static_cast<int>(i);
            if (!by_name.emplace(fn.name, fn.id).second)
                throw SyntaxError(1, 1, "duplicate function name '" + fn.name + "'");
        }
        resolve(prog, by_name);
        number_nodes(prog);
        return prog;
    }

  private:
    // --- token plumbing -------------------------------------------------

    void bump() { cur_ = lexer_.next(); }

    Token expect(Tok kind, const char* message) {
        if (cur_.kind != kind) throw SyntaxError(cur_.line, cur_.col, message);
        Token t = cur_;
        bump();
        return t;
    }

    bool accept(Tok kind) {
        if (cur_.kind != kind) return false;
        bump();
        return true;
    }

    [[noreturn]] void fail(const std::string& message) const {
        throw SyntaxError(cur_.line, cur_.col, message);
    }

    // --- grammar --------------------------------------------------------

    Function parse_function() {
        Function fn;
        fn.name = expect(Tok::Ident, "expected function name").text;
        expect(Tok::LParen, "expected '('");
        if (cur_.kind != Tok::RParen) {
            do {
                Param p;
                p.name = expect(Tok::Ident, "expected parameter name").text;
                expect(Tok::Colon, "expected ':'");
                if (accept(Tok::KwInt)) p.type = Type::Int;
                else if (accept(Tok::KwBool)) p.type = Type::Bool;
                else fail("expected parameter type 'int' or 'bool'");
                fn.params.push_back(std::move(p));
            } while (accept(Tok::Comma));
        }
        expect(Tok::RParen, "expected ')'");
        cur_fn_ = &fn;
        fn.body = parse_block();
        cur_fn_ = nullptr;
        return fn;
    }

    std::vector<StmtRef> parse_block() {
        expect(Tok::LBrace, "expected '{'");
        std::vector<StmtRef> out;
        while (cur_.kind != Tok::RBrace) {
            if (cur_.kind == Tok::Eof) fail("unterminated block");
            out.push_back(parse_stmt());
        }
        bump(); // consume '}'
        return out;
    }

    StmtRef new_stmt(StmtKind kind, int line, int col) {
        Stmt s;
        s.kind = kind;
        s.span.line = line;
        s.span.col = col;
        cur_fn_->stmts.push_back(std::move(s));
        return static_cast<StmtRef>(cur_fn_->stmts.size() - 1);
    }

    StmtRef parse_stmt() {
        const int line = cur_.line, col = cur_.col;
        switch (cur_.kind) {
            case Tok::KwLet: {
                bump();
                std::string name = expect(Tok::Ident, "expected variable name").text;
                expect(Tok::Assign, "expected '='");
                ExprRef value = parse_expr();
                expect(Tok::Semi, "expected ';'");
                StmtRef s = new_stmt(StmtKind::Let, line, col);
                cur_fn_->stmts[s].var = std::move(name);
                cur_fn_->stmts[s].expr = value;
                return s;
            }
            case Tok::KwIf: {
                bump();
                expect(Tok::LParen, "expected '('");
                ExprRef cond = parse_expr();
                expect(Tok::RParen, "expected ')'");
                auto then_block = parse_block();
                std::vector<StmtRef> else_block;
                bool has_else = false;
                if (accept(Tok::KwElse)) {
                    has_else = true;
                    if (cur_.kind == Tok::KwIf) {
                        else_block.push_back(parse_stmt()); // else-if chain
                    } else {
                        else_block = parse_block();
                    }
                }
                StmtRef s = new_stmt(StmtKind::If, line, col);
                auto& st = cur_fn_->stmts[s];
                st.expr = cond;
                st.body = std::move(then_block);
                st.orelse = std::move(else_block);
                st.has_else = has_else;
                return s;
            }
            case Tok::KwWhile: {
                bump();
                expect(Tok::LParen, "expected '('");
                ExprRef cond = parse_expr();
                expect(Tok::RParen, "expected ')'");
                auto body = parse_block();
                StmtRef s = new_stmt(StmtKind::While, line, col);
                auto& st = cur_fn_->stmts[s];
                st.expr = cond;
                st.body = std::move(body);
                return s;
            }
            case Tok::KwReturn: {
                bump();
                ExprRef value = -1;
                if (cur_.kind != Tok::Semi) value = parse_expr();
                expect(Tok::Semi, "expected ';'");
                StmtRef s = new_stmt(StmtKind::Return, line, col);
                cur_fn_->stmts[s].expr = value;
                return s;
            }
            case Tok::KwOutput: {
                bump();
                expect(Tok::LParen, "expected '('");
                ExprRef value = parse_expr();
                expect(Tok::RParen, "expected ')'");
                expect(Tok::Semi, "expected ';'");
                StmtRef s = new_stmt(StmtKind::Output, line, col);
                cur_fn_->stmts[s].expr = value;
                return s;
            }
            case Tok::Ident: {
                std::string name = cur_.text;
                bump();
                expect(Tok::Assign, "expected '=' in assignment");
                ExprRef value = parse_expr();
                expect(Tok::Semi, "expected ';'");
                StmtRef s = new_stmt(StmtKind::Assign, line, col);
                cur_fn_->stmts[s].var = std::move(name);
                cur_fn_->stmts[s].expr = value;
                return s;
            }
            default:
                fail("expected statement");
        }
    }

    ExprRef new_expr(ExprKind kind, int line, int col) {
        Expr e;
        e.kind = kind;
        e.span.line = line;
        e.span.col = col;
        cur_fn_->exprs.push_back(std::move(e));
        return static_cast<ExprRef>(cur_fn_->exprs.size() - 1);
    }

    ExprRef binary(BinOp op, ExprRef lhs, ExprRef rhs, int line, int col) {
        ExprRef e = new_expr(ExprKind::Binary, line, col);
        auto& x = cur_fn_->exprs[e];
        x.bin_op = op;
        x.a = lhs;
        x.b = rhs;
        return e;
    }

    ExprRef parse_expr() { return parse_or(); }

    ExprRef parse_or() {
        ExprRef lhs = parse_and();
        while (cur_.kind == Tok::KwOr) {
            const int line = cur_.line, col = cur_.col;
            bump();
            lhs = binary(BinOp::Or, lhs, parse_and(), line, col);
        }
        return lhs;
    }

    ExprRef parse_and() {
        ExprRef lhs = parse_equality();
        while (cur_.kind == Tok::KwAnd) {
            const int line = cur_.line, col = cur_.col;
            bump();
            lhs = binary(BinOp::And, lhs, parse_equality(), line, col);
        }
        return lhs;
    }

    ExprRef parse_equality() {
        ExprRef lhs = parse_relational();
        while (cur_.kind == Tok::EqEq || cur_.kind == Tok::NotEq) {
            const BinOp op = cur_.kind == Tok::EqEq ? BinOp::Eq : BinOp::Ne;
            const int line = cur_.line, col = cur_.col;
            bump();
            lhs = binary(op, lhs, parse_relational(), line, col);
        }
        return lhs;
    }

    ExprRef parse_relational() {
        ExprRef lhs = parse_additive();
        while (cur_.kind == Tok::Lt || cur_.kind == Tok::Le || cur_.kind == Tok::Gt ||
               cur_.kind == Tok::Ge) {
            BinOp op = BinOp::Lt;
            if (cur_.kind == Tok::Le) op = BinOp::Le;
            else if (cur_.kind == Tok::Gt) op = BinOp::Gt;
            else if (cur_.kind == Tok::Ge) op = BinOp::Ge;
            const int line = cur_.line, col = cur_.col;
            bump();
            lhs = binary(op, lhs, parse_additive(), line, col);
        }
        return lhs;
    }

    ExprRef parse_additive() {
        ExprRef lhs = parse_multiplicative();
        while (cur_.kind == Tok::Plus || cur_.kind == Tok::Minus) {
            const BinOp op = cur_.kind == Tok::Plus ? BinOp::Add : BinOp::Sub;
            const int line = cur_.line, col = cur_.col;
            bump();
            lhs = binary(op, lhs, parse_multiplicative(), line, col);
        }
        return lhs;
    }

    ExprRef parse_multiplicative() {
        ExprRef lhs = parse_unary();
        while (cur_.kind == Tok::Star || cur_.kind == Tok::Slash || cur_.kind == Tok::Percent) {
            BinOp op = BinOp::Mul;
            if (cur_.kind == Tok::Slash) op = BinOp::Div;
            else if (cur_.kind == Tok::Percent) op = BinOp::Mod;
            const int line = cur_.line, col = cur_.col;
            bump();
            lhs = binary(op, lhs, parse_unary(), line, col);
        }
        return lhs;
    }

    ExprRef parse_unary() {
        if (cur_.kind == Tok::Minus || cur_.kind == Tok::KwNot) {
            const UnOp op = cur_.kind == Tok::Minus ? UnOp::Neg : UnOp::Not;
            const int line = cur_.line, col = cur_.col;
            bump();
            ExprRef operand = parse_unary();
            ExprRef e = new_expr(ExprKind::Unary, line, col);
            auto& x = cur_fn_->exprs[e];
            x.un_op = op;
            x.a = operand;
            return e;
        }
        return parse_primary();
    }

    ExprRef parse_primary() {
        const int line = cur_.line, col = cur_.col;
        switch (cur_.kind) {
            case Tok::Int: {
                const std::int64_t v = cur_.int_val;
                bump();
                ExprRef e = new_expr(ExprKind::IntLit, line, col);
                cur_fn_->exprs[e].int_val = v;
                return e;
            }
            case Tok::KwTrue:
            case Tok::KwFalse: {
                const bool v = cur_.kind == Tok::KwTrue;
                bump();
                ExprRef e = new_expr(ExprKind::BoolLit, line, col);
                cur_fn_->exprs[e].bool_val = v;
                return e;
            }
            case Tok::LParen: {
                bump();
                ExprRef inner = parse_expr();
                expect(Tok::RParen, "expected ')'");
                return inner;
            }
            case Tok::Ident: {
                std::string name = cur_.text;
                bump();
                if (accept(Tok::LParen)) {
                    std::vector<ExprRef> args;
                    if (cur_.kind != Tok::RParen) {
                        do {
                            args.push_back(parse_expr());
                        } while (accept(Tok::Comma));
                    }
                    expect(Tok::RParen, "expected ')'");
                    ExprRef e = new_expr(ExprKind::Call, line, col);
                    auto& x = cur_fn_->exprs[e];
                    x.name = std::move(name);
                    x.args = std::move(args);
                    return e;
                }
                ExprRef e = new_expr(ExprKind::Var, line, col);
                cur_fn_->exprs[e].name = std::move(name);
                return e;
            }
            default:
                fail("expected expression");
        }
    }

    // --- resolution -------------------------------------------------------

    static void resolve(Program& prog, const std::map<std::string, int>& by_name) {
        for (auto& fn : prog.functions) {
            std::unordered_map<std::string, int> slots;
            for (auto& p : fn.params) {
                if (slots.count(p.name))
                    throw SyntaxError(1, 1, "duplicate parameter '" + p.name + "' in " + fn.name);
                slots.emplace(p.name, static_cast<int>(slots.size()));
            }
            // Variables are function scoped: a let introduces a slot at its
            // source position; use before declaration is an error.
            for (auto& st : fn.stmts) {
                if (st.kind == StmtKind::Let) {
                    if (slots.count(st.var))
                        throw SyntaxError(st.span.line, st.span.col,
                                          "redeclaration of '" + st.var + "' in " + fn.name);
                    st.slot = static_cast<int>(slots.size());
                    slots.emplace(st.var, st.slot);
                }
            }
            fn.slot_count = static_cast<int>(slots.size());
            for (auto& st : fn.stmts) {
                if (st.kind == StmtKind::Assign) {
                    auto it = slots.find(st.var);
                    if (it == slots.end())
                        throw SyntaxError(st.span.line, st.span.col,
                                          "assignment to undeclared '" + st.var + "'");
                    st.slot = it->second;
                }
            }
            for (auto& e : fn.exprs) {
                if (e.kind == ExprKind::Var) {
                    auto it = slots.find(e.name);
                    if (it == slots.end())
                        throw SyntaxError(e.span.line, e.span.col, "unknown variable '" + e.name + "'");
                    e.slot = it->second;
                } else if (e.kind == ExprKind::Call) {
                    auto it = by_name.find(e.name);
                    if (it == by_name.end())
                        throw Error(ErrorCode::UnknownCallee,
                                    "call to undeclared function '" + e.name + "'");
                    e.callee = it->second;
                }
            }
        }
        // Declare-before-use for lets: the slot of every Var reference must
        // already exist at that point in source order. Statement order in the
        // arena equals creation order, which is completion order, so check by
        // span position instead: a Var whose slot belongs to a later let.
        for (auto& fn : prog.functions) {
            std::vector<std::pair<int, int>> let_pos(static_cast<std::size_t>(fn.slot_count),
                                                     {0, 0});
            for (const auto& st : fn.stmts)
                if (st.kind == StmtKind::Let)
                    let_pos[static_cast<std::size_t>(st.slot)] = {st.span.line, st.span.col};
            for (const auto& e : fn.exprs) {
                if (e.kind != ExprKind::Var) continue;
                const auto pos = let_pos[static_cast<std::size_t>(e.slot)];
                if (pos.first == 0) continue; // parameter
                if (e.span.line < pos.first ||
                    (e.span.line == pos.first && e.span.col < pos.second))
                    throw SyntaxError(e.span.line, e.span.col,
                                      "use of '" + e.name + "' before its declaration");
            }
        }
    }

    // --- canonical numbering ----------------------------------------------

    static void number_nodes(Program& prog) {
        NodeId next = 0;
        for (auto& fn : prog.functions) {
            for (StmtRef s : fn.body) number_stmt(fn, s, next);
            fn.predicates.clear();
            collect_predicates(fn, fn.body);
        }
        prog.node_count = next;
    }

    static void number_stmt(Function& fn, StmtRef ref, NodeId& next) {
        Stmt& st = fn.stmts[static_cast<std::size_t>(ref)];
        st.node_id = next++;
        if (st.expr >= 0) number_expr(fn, st.expr, next);
        for (StmtRef s : st.body) number_stmt(fn, s, next);
        for (StmtRef s : st.orelse) number_stmt(fn, s, next);
    }

    static void number_expr(Function& fn, ExprRef ref, NodeId& next) {
        Expr& e = fn.exprs[static_cast<std::size_t>(ref)];
        e.node_id = next++;
        if (e.a >= 0) number_expr(fn, e.a, next);
        if (e.b >= 0) number_expr(fn, e.b, next);
        for (ExprRef a : e.args) number_expr(fn, a, next);
    }

    static void collect_predicates(Function& fn, const std::vector<StmtRef>& block) {
        for (StmtRef ref : block) {
            const Stmt& st = fn.stmts[static_cast<std::size_t>(ref)];
            if (st.kind == StmtKind::If || st.kind == StmtKind::While) {
                fn.predicates.push_back(ref);
                collect_predicates(fn, st.body);
                collect_predicates(fn, st.orelse);
            }
        }
    }

    Lexer lexer_;
    Token cur_{Tok::Eof, "", 0, 1, 1};
    Function* cur_fn_ = nullptr;
};

} // namespace

std::string_view type_name(Type t) { return t == Type::Int ? "int" : "bool"; }

std::string_view binop_token(BinOp op) {
    switch (op) {
        case BinOp::Add: return "+";
        case BinOp::Sub: return "-";
        case BinOp::Mul: return "*";
        case BinOp::Div: return "/";
        case BinOp::Mod: return "%";
        case BinOp::Lt: return "<";
        case BinOp::Le: return "<=";
        case BinOp::Gt: return ">";
        case BinOp::Ge: return ">=";
        case BinOp::Eq: return "==";
        case BinOp::Ne: return "!=";
        case BinOp::And: return "and";
        case BinOp::Or: return "or";
    }
    return "?";
}

const Function* Program::find(std::string_view name) const {
    for (const auto& fn : functions)
        if (fn.name == name) return &fn;
    return nullptr;
}

Program parse_program(std::string_view source, std::string source_name) {
    if (source.empty()) throw Error(ErrorCode::EmptyProgram, "empty source " + source_name);
    Parser parser(source);
    return parser.parse(std::move(source_name));
}

namespace {

bool expr_equal(const Function& fa, const Function& fb, ExprRef ra, ExprRef rb) {
    if ((ra < 0) != (rb < 0)) return false;
    if (ra < 0) return true;
    const Expr& a = fa.expr(ra);
    const Expr& b = fb.expr(rb);
    if (a.kind != b.kind || a.node_id != b.node_id) return false;
    switch (a.kind) {
        case ExprKind::IntLit: return a.int_val == b.int_val;
        case ExprKind::BoolLit: return a.bool_val == b.bool_val;
        case ExprKind::Var: return a.name == b.name && a.slot == b.slot;
        case ExprKind::Unary: return a.un_op == b.un_op && expr_equal(fa, fb, a.a, b.a);
        case ExprKind::Binary:
            return a.bin_op == b.bin_op && expr_equal(fa, fb, a.a, b.a) && expr_equal(fa, fb, a.b, b.b);
        case ExprKind::Call: {
            if (a.name != b.name || a.args.size() != b.args.size()) return false;
            for (std::size_t i = 0; i < a.args.size(); ++i)
                if (!expr_equal(fa, fb, a.args[i], b.args[i])) return false;
            return true;
        }
    }
    return false;
}

bool block_equal(const Function& fa, const Function& fb, const std::vector<StmtRef>& ba,
                 const std::vector<StmtRef>& bb);

bool stmt_equal(const Function& fa, const Function& fb, StmtRef ra, StmtRef rb) {
    const Stmt& a = fa.stmt(ra);
    const Stmt& b = fb.stmt(rb);
    if (a.kind != b.kind || a.node_id != b.node_id) return false;
    if (a.var != b.var || a.has_else != b.has_else) return false;
    if (!expr_equal(fa, fb, a.expr, b.expr)) return false;
    return block_equal(fa, fb, a.body, b.body) && block_equal(fa, fb, a.orelse, b.orelse);
}

bool block_equal(const Function& fa, const Function& fb, const std::vector<StmtRef>& ba,
                 const std::vector<StmtRef>& bb) {
    if (ba.size() != bb.size()) return false;
    for (std::size_t i = 0; i < ba.size(); ++i)
        if (!stmt_equal(fa, fb, ba[i], bb[i])) return false;
    return true;
}

} // namespace

bool structurally_equal(const Program& a, const Program& b) {
    if (a.functions.size() != b.functions.size()) return false;
    for (std::size_t i = 0; i < a.functions.size(); ++i) {
        const Function& fa = a.functions[i];
        const Function& fb = b.functions[i];
        if (fa.name != fb.name || fa.params.size() != fb.params.size()) return false;
        for (std::size_t j = 0; j < fa.params.size(); ++j)
            if (fa.params[j].name != fb.params[j].name || fa.params[j].type != fb.params[j].type)
                return false;
        if (!block_equal(fa, fb, fa.body, fb.body)) return false;
    }
    return true;
}

} // namespace sbstlab::minilang

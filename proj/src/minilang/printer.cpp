#include "sbstlab/minilang/printer.hpp"

#include <string>

namespace sbstlab::minilang {

namespace {

void write_expr(std::string& out, const Function& fn, ExprRef ref) {
    const Expr& e = fn.expr(ref);
    switch (e.kind) {
        case ExprKind::IntLit:
            out += std::to_string(e.int_val);
            break;
        case ExprKind::BoolLit:
            out += e.bool_val ? "true" : "false";
            break;
        case ExprKind::Var:
            out += e.name;
            break;
        case ExprKind::Unary:
            out += e.un_op == UnOp::Neg ? "(-" : "(not ";
            write_expr(out, fn, e.a);
            out += ')';
            break;
        case ExprKind::Binary:
            out += '(';
            write_expr(out, fn, e.a);
            out += ' ';
            out += binop_token(e.bin_op);
            out += ' ';
            write_expr(out, fn, e.b);
            out += ')';
            break;
        case ExprKind::Call:
            out += e.name;
            out += '(';
            for (std::size_t i = 0; i < e.args.size(); ++i) {
                if (i > 0) out += ", ";
                write_expr(out, fn, e.args[i]);
            }
            out += ')';
            break;
    }
}

void write_block(std::string& out, const Function& fn, const std::vector<StmtRef>& block, int indent);

void write_stmt(std::string& out, const Function& fn, StmtRef ref, int indent) {
    const Stmt& st = fn.stmt(ref);
    out.append(static_cast<std::size_t>(indent) * 2, ' ');
    switch (st.kind) {
        case StmtKind::Let:
            out += "let " + st.var + " = ";
            write_expr(out, fn, st.expr);
            out += ";\n";
            break;
        case StmtKind::Assign:
            out += st.var + " = ";
            write_expr(out, fn, st.expr);
            out += ";\n";
            break;
        case StmtKind::If:
            out += "if (";
            write_expr(out, fn, st.expr);
            out += ") {\n";
            write_block(out, fn, st.body, indent + 1);
            out.append(static_cast<std::size_t>(indent) * 2, ' ');
            if (st.has_else) {
                out += "} else {\n";
                write_block(out, fn, st.orelse, indent + 1);
                out.append(static_cast<std::size_t>(indent) * 2, ' ');
            }
            out += "}\n";
            break;
        case StmtKind::While:
            out += "while (";
            write_expr(out, fn, st.expr);
            out += ") {\n";
            write_block(out, fn, st.body, indent + 1);
            out.append(static_cast<std::size_t>(indent) * 2, ' ');
            out += "}\n";
            break;
        case StmtKind::Return:
            out += "return";
            if (st.expr >= 0) {
                out += ' ';
                write_expr(out, fn, st.expr);
            }
            out += ";\n";
            break;
        case StmtKind::Output:
            out += "output(";
            write_expr(out, fn, st.expr);
            out += ");\n";
            break;
    }
}

void write_block(std::string& out, const Function& fn, const std::vector<StmtRef>& block, int indent) {
    for (StmtRef s : block) write_stmt(out, fn, s, indent);
}

} // namespace

std::string print_expr(const Function& fn, ExprRef ref) {
    std::string out;
    write_expr(out, fn, ref);
    return out;
}

std::string print_program(const Program& prog) {
    std::string out;
    for (std::size_t i = 0; i < prog.functions.size(); ++i) {
        const Function& fn = prog.functions[i];
        if (i > 0) out += '\n';
        out += "fn " + fn.name + "(";
        for (std::size_t j = 0; j < fn.params.size(); ++j) {
            if (j > 0) out += ", ";
            out += fn.params[j].name + ": ";
            out += type_name(fn.params[j].type);
        }
        out += ") {\n";
        write_block(out, fn, fn.body, 1);
        out += "}\n";
    }
    return out;
}

} // namespace sbstlab::minilang

#pragma once

#include <string>

#include "sbstlab/minilang/ast.hpp"

namespace sbstlab::minilang {

/// Canonical source form: two-space indentation, one statement per line,
/// fully parenthesized expressions. print(parse(print(p))) == print(p).
std::string print_program(const Program& prog);

std::string print_expr(const Function& fn, ExprRef ref);

} // namespace sbstlab::minilang

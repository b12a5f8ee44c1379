#pragma once

#include <string_view>

#include "sbstlab/minilang/ast.hpp"

namespace sbstlab::minilang {

/// Parses a `.mlp` source text into a resolved Program.
///
/// Resolution happens here: call targets (UnknownCallee), variable slots
/// (declare-before-use, no redeclaration), function and parameter name
/// uniqueness. Node ids are assigned in a canonical pre-order pass after
/// parsing, so they are a pure function of program structure.
///
/// Throws SyntaxError on malformed input, Error(EmptyProgram) when no
/// function is declared, Error(UnknownCallee) for a call to a missing
/// function.
Program parse_program(std::string_view source, std::string source_name = "<memory>");

} // namespace sbstlab::minilang

#pragma once

#include <functional>
#include <string>

#include "l42mu/ast.hpp"

namespace l42mu {

using TypePrinter = std::function<std::string(const TypePath&)>;

// Deterministic rendering of a flattened table: nested classes (name-sorted)
// before methods (sorted by name, then arity), implements sorted and deduped,
// type paths shortened to the smallest form that re-qualifies identically.
std::string canonical_print(const DeclarationTable& table, bool prelude = true);
std::string canonical_print(const CodeLiteral& lit, bool prelude = true);

// Source rendering of a possibly unflattened table (sums, renames, super).
// Re-parseable; used when emitting shrunken counterexamples.
std::string print_source(const DeclarationTable& table, bool prelude = true);

// Dotted path; single-segment Int/Bool/Void render as int/bool/void.
std::string print_type_plain(const TypePath& path);

std::string print_expr(const Expr& e, const TypePrinter& types);
std::string print_expr_plain(const Expr& e);

std::string print_sig(const MethodSig& sig, const TypePrinter& types);

}  // namespace l42mu
